#pragma once

#include <string>
#include <utility>
#include <vector>

#include "specdiff/filter.hpp"
#include "specdiff/grid.hpp"
#include "specdiff/schedule.hpp"
#include "specdiff/score.hpp"

namespace specdiff {

/// Sampler configuration. ILVR guidance runs while the loop index i (counting
/// steps..1) is greater than stop_step; the remaining stop_step iterations are
/// plain reverse steps.
struct GuidanceConfig {
    FilterSpec filter{1, 18, -0.5};
    int stop_step = 6;
    double temperature = 1.0;
    int steps = 50;
    int speaker = 0;
};

/// Throws ValidationError when constraints are violated (steps >= 1,
/// 0 <= stop_step <= steps, temperature > 0, filter factors >= 1).
void validate(const GuidanceConfig& cfg);

/// Per-step observability record. lowpass_residual is the norm
/// ||f(x_{i-1}) - f(y_{i-1})|| after the update; lowpass_ref_norm carries
/// ||f(y_{i-1})|| so callers can form the relative residual. Both are zero on
/// steps where guidance is inactive.
struct TraceRecord {
    int step;
    double t;
    double drift_norm;
    bool ilvr_active;
    double lowpass_residual;
    double lowpass_ref_norm;
};

using SampleTrace = std::vector<TraceRecord>;

/// CSV with header step,t,drift_norm,ilvr_active,lowpass_residual.
void write_trace_csv(const SampleTrace& trace, const std::string& path);

/// Draws from the forward transition kernel at time t:
/// m + alpha sqrt(v) with (m, v) = transition_moments(y, mu, t).
Spectrogram forward_sample(const Spectrogram& y, const Spectrogram& mu, double t,
                           const NoiseSchedule& sched, Rng& rng);

/// One deterministic reverse update at loop index i (1 <= i <= steps):
/// t = i/steps, dx = 0.5 (mu - x - score) beta(t) / steps, returns x - dx.
Spectrogram reverse_step(const Spectrogram& x_i, const Spectrogram& mu, int i,
                         const GuidanceConfig& cfg, const NoiseSchedule& sched,
                         const ScoreModel& model);

/// Low-pass replacement: f(y_next) + (x_prime - f(x_prime)).
Spectrogram ilvr_step(const Spectrogram& x_prime, const Spectrogram& y_next,
                      const FilterSpec& fs);

/// Full guided sampling loop. x_T ~ N(mu, I/temperature), then steps reverse
/// updates; while i > stop_step each proposal is refined against the
/// forward-noised reference. y_ref must already be aligned to mu's shape.
std::pair<Spectrogram, SampleTrace>
sample_guided(const Spectrogram& mu, const Spectrogram& y_ref,
              const GuidanceConfig& cfg, const NoiseSchedule& sched,
              const ScoreModel& model, Rng& rng);

/// sample_guided with the refinement branch disabled. Identical RNG
/// consumption for x_T, so stop_step == steps reproduces this bit-exactly.
Spectrogram sample_unguided(const Spectrogram& mu, const GuidanceConfig& cfg,
                            const NoiseSchedule& sched, const ScoreModel& model,
                            Rng& rng);

/// Linear interpolation along the time axis to target_time frames
/// (origin-aligned mapping src = dst * n_time/target, edge-clamped).
/// Frequency bins must match; time-only alignment.
Spectrogram align_reference(const Spectrogram& y, int target_time);

/// Alignment policy used by the CLI front end.
enum class AlignMode { Stretch, Pad, Crop };

/// Stretch: align_reference. Pad: replicate the last frame (reference must
/// not be longer than the target). Crop: keep the first target_time frames
/// (reference must not be shorter).
Spectrogram align_reference_mode(const Spectrogram& y, int target_time,
                                 AlignMode mode);

} // namespace specdiff
