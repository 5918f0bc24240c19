"""Guided diffusion sampling on spectrogram grids.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its public surface.
"""

from ._core import (  # noqa: F401
    AnalyticGaussianScore,
    ConfigError,
    FileFormatError,
    FilterSpec,
    GuidanceConfig,
    NoiseSchedule,
    NumericError,
    Rng,
    ScoreModel,
    ShapeError,
    SpeakerTemplate,
    Spectrogram,
    TemplateScore,
    __version__,
    align_reference,
    axpy,
    band_distance,
    cepstra,
    downsample,
    estimate_f0,
    export_pgm,
    forward_sample,
    gaussian_like,
    ilvr_step,
    lowpass,
    mae_f0,
    make_prior,
    mcd_dtw,
    new_spectrogram,
    parse_template_spec,
    read_spectrogram,
    render,
    reverse_step,
    sample_guided,
    sample_unguided,
    upsample,
    write_spectrogram,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
