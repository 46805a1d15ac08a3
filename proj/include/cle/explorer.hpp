#pragma once

#include "cle/drivers.hpp"
#include "cle/loewner.hpp"
#include "cle/rng.hpp"

#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

namespace cle {

// Target-directed loop exploration. The driver grows boundary arches, one
// per excursion; walking excursions in order while carrying interior points
// through the slit maps discovers, for each target, the arch that encloses
// it. Work proceeds in rounds: a round runs a fresh driver until either some
// target is enclosed or the hull has squeezed the primary target's image
// below half its starting height. Between rounds the frame is renormalized
// so the current primary target sits at i and the root at 0, which makes
// rounds independent renewals; the continuation uses a fresh substream,
// justified by the Markov property of the ensemble.

enum class DriverFamily { Beta, Mu };

struct ExploreParams {
    double kappa = 3.5;
    DriverFamily family = DriverFamily::Beta;
    double beta = 0.0; // orientation bias, beta family
    double mu = 0.0;   // drift rate, mu family (kappa forced to 4)
    double r = 0.05;   // macro cutoff: duration >= r^2
    double dt = 1e-4;
    double chunk_capacity = 2.0; // driver capacity simulated per extension
    // Re-root once a round has revealed this much capacity. Excursion
    // durations are heavy tailed, so a round may otherwise stall inside one
    // enormous bubble; abandoning it censors only loops whose closing
    // capacity crosses the cap, a vanishing fraction of captures, and the
    // count of such rounds is reported.
    double round_capacity_cap = 16.0;
    int max_rounds = 10000;
    // Re-root once the primary target's image height falls below this
    // fraction of its height at the round's start (checked at excursion
    // ends). Smaller values squeeze more per round, which risks the image
    // degenerating inside one long excursion; larger values renormalize so
    // eagerly that rounds stop making progress.
    double renorm_height = 0.5;
    // Capture nomination, checked at every step: a point is a candidate when
    // its image height has dropped below factor * sqrt(dt). Everything an
    // arch encloses is flattened onto the swallowed stretch of the axis, but
    // points hugging the axis just outside are flat too, so candidates are
    // confirmed by the winding of the arch around them before they count as
    // enclosed.
    double swallow_factor = 5.0;
    // Compensation constant for the beta family. NaN (the default) measures
    // the mean assembled macro-excursion integral on this grid at engine
    // start, which centers the sign-bias compensation at the resolution the
    // walk runs at; see grid_c_estimate. Batch callers should measure once
    // and pass the value through to avoid recalibrating per sample.
    double c_value = std::numeric_limits<double>::quiet_NaN();
    // Polyline budget per loop; 0 skips polylines for the fast law-sampling
    // path. Capture confirmation does not depend on this.
    int polyline_points = 0;
    // Express polylines in the caller's frame by inverting all accumulated
    // maps (costs one inverse chain walk per point).
    bool pull_back_polyline = true;
};

// One traced loop. The arch a sealed excursion grows rises from the domain
// boundary and closes back onto it, so the polyline is the off-boundary part
// of the loop and the loop completes along the boundary between the two
// endpoints; the straight chord between them stands in for that boundary run
// in winding tests at interior points. The polyline is ordered so a loop of
// orientation +1 winds +1 around what it encloses, and ends at the root.
struct QuasiLoop {
    std::vector<std::complex<double>> polyline;
    std::complex<double> root{0.0, 0.0}; // where the arch lifted off the boundary
    int orientation = 0;     // sign of the generating excursion
    double hcap = 0.0;       // 2 * excursion duration
    double closure_gap = 0.0; // endpoint separation: the arch's boundary footprint
    bool micro = false;      // bubble below the macro cutoff (cutoff artifact)
    double end_time = 0.0;   // capacity clock (zero runs excluded) at closure
    std::vector<std::complex<double>> surrounded_targets;
};

struct TargetOutcome {
    std::complex<double> target;
    bool captured = false;
    int loop_index = -1;
    double log_cr = 0.0; // log conformal radius at capture, caller's frame
    int orientation = 0;
    bool micro = false;
};

struct DisconnectionEvent {
    double time = 0.0;
    int loop_index = -1;
    std::vector<std::size_t> enclosed;
    std::vector<std::size_t> remaining;
};

struct CleSample {
    std::vector<std::complex<double>> targets;
    std::vector<QuasiLoop> loops;
    std::vector<TargetOutcome> outcomes;
    std::vector<DisconnectionEvent> tree;
    std::vector<double> renormalization_times;
    int rounds = 0;
    int ambiguous = 0;     // captures where target fell in the winding guard band
    int capped_rounds = 0; // rounds abandoned at the capacity cap
    bool ok = true;        // false if the round cap was hit with targets left
};

// Multi-target sample: one shared exploration while targets stay together,
// shared loop objects for targets enclosed by the same bubble, fresh streams
// after each disconnection.
CleSample branching_sample(const ExploreParams& params,
                           const std::vector<std::complex<double>>& targets, Rng rng);

// The compensation constant an engine would measure for these parameters:
// grid_c_estimate at the params' dimension, step and cutoff. Measure once,
// store into c_value, and reuse across a batch of samples.
double calibrated_c(const ExploreParams& params, Rng rng, std::size_t min_macros = 20000);

struct RadialResult {
    QuasiLoop loop;
    TargetOutcome outcome;
    std::vector<double> renormalization_times;
    int rounds = 0;
    bool ok = false;
};

// Single-target exploration; identical stream-for-stream to branching_sample
// with one target.
RadialResult radial_explore(const ExploreParams& params, std::complex<double> target, Rng rng);

// Conformal radius at the (first) target recorded at every excursion end, on
// the capacity clock, until the target's loop closes or time_cap is used up.
struct CrTrajectory {
    std::vector<double> times;
    std::vector<double> cr;
    double capture_time = -1.0; // < 0 if the cap hit first
};

CrTrajectory explore_cr_trajectory(const ExploreParams& params, std::complex<double> target,
                                   double time_cap, Rng rng);

// Stopping-time surrogate on a recorded trajectory: the first excursion end
// where the radius is <= 2 eps (a ball of radius eps then reaches around the
// target), or the closing time of the target's loop if that comes first,
// capped at 1/eps. Monotone: smaller eps never stops earlier.
double stop_at_tau_eps(const CrTrajectory& traj, double eps);

// Winding number of a closed polyline (implicitly closed last -> first)
// around a point; exposed for the orientation checks.
int winding_number(const std::vector<std::complex<double>>& polyline, std::complex<double> p);

} // namespace cle
