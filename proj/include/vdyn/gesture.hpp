#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "vdyn/common.hpp"
#include "vdyn/golden.hpp"

namespace vdyn {

// Mass-spring parameters of one gesture. Damping is structural (critical),
// always derived from mass and stiffness rather than stored.
struct GestureParams {
    double target = 0.0;             // tract-variable value in [0,1]
    double stiffness_k = 2000.0;     // 1/s^2
    double cubic_d = 0.0;            // 1/(s^2 * unit^2), softens the restoring force
    double blending_strength = 1.0;  // weight when several gestures are active

    static constexpr double mass_m = 1.0;

    double damping_b() const { return 2.0 * std::sqrt(mass_m * stiffness_k); }

    void validate() const {
        require(target >= 0.0 && target <= 1.0, "gesture target must lie in [0,1]");
        require(stiffness_k > 0.0, "stiffness_k must be > 0");
        require(cubic_d >= 0.0, "cubic_d must be >= 0");
        require(blending_strength > 0.0, "blending_strength must be > 0");
    }
};

struct Gesture {
    std::string tract_variable = "TBCD";
    GestureParams params;
    double onset_s = 0.0;
    double duration_s = 0.250;  // activation interval is [onset, onset + duration)
    std::string role = "single";

    double offset_s() const { return onset_s + duration_s; }

    void validate() const {
        params.validate();
        require(duration_s > 0.0, "gesture duration must be > 0");
        require(onset_s >= 0.0, "gesture onset must be >= 0");
        require(!tract_variable.empty(), "gesture needs a tract variable label");
    }
};

struct GestureScore {
    std::vector<Gesture> gestures;

    void validate() const {
        require(!gestures.empty(), "score has no gestures");
        for (const auto& g : gestures) g.validate();
        for (const auto& g : gestures)
            require(g.tract_variable == gestures.front().tract_variable,
                    "all gestures in a score must drive the same tract variable");
    }

    double last_offset_s() const {
        double t = 0.0;
        for (const auto& g : gestures) t = std::max(t, g.offset_s());
        return t;
    }
};

struct SimulationConfig {
    double dt = 0.001;
    double initial_position = 0.0;
    double initial_velocity = 0.0;
    double tail_after_last_offset = 0.0;

    void validate() const {
        require(dt > 0.0, "dt must be > 0");
        require(initial_position >= 0.0 && initial_position <= 1.0,
                "initial position must lie in [0,1]");
        require(tail_after_last_offset >= 0.0, "tail must be >= 0");
    }
};

struct SimOutput {
    Series time;
    Series position;
    Series velocity;  // integrated state, not a finite difference of position
    std::vector<int> active_gesture_count;
    double dt = 0.001;

    Series speed() const {
        Series s(velocity.size());
        std::transform(velocity.begin(), velocity.end(), s.begin(),
                       [](double v) { return std::abs(v); });
        return s;
    }
};

struct State {
    double position = 0.0;
    double velocity = 0.0;
};

namespace detail {

// x'' + b x' + k x - d x^3 = 0, x = position - target.
inline double accel(const State& s, const GestureParams& p) {
    const double x = s.position - p.target;
    return (-p.damping_b() * s.velocity - p.stiffness_k * x + p.cubic_d * x * x * x) /
           GestureParams::mass_m;
}

}  // namespace detail

// One classical fixed-step RK4 advance of the driven state.
inline State step_dynamics(const State& s, const GestureParams& effective, double dt) {
    require(dt > 0.0, "step_dynamics: dt must be > 0");
    if (!std::isfinite(s.position) || !std::isfinite(s.velocity))
        throw divergence_error("step_dynamics: non-finite state");

    const auto deriv = [&](const State& u) {
        return State{u.velocity, detail::accel(u, effective)};
    };
    const State k1 = deriv(s);
    const State k2 = deriv({s.position + 0.5 * dt * k1.position, s.velocity + 0.5 * dt * k1.velocity});
    const State k3 = deriv({s.position + 0.5 * dt * k2.position, s.velocity + 0.5 * dt * k2.velocity});
    const State k4 = deriv({s.position + dt * k3.position, s.velocity + dt * k3.velocity});

    State out{s.position + dt / 6.0 * (k1.position + 2.0 * k2.position + 2.0 * k3.position + k4.position),
              s.velocity + dt / 6.0 * (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity + k4.velocity)};
    if (!std::isfinite(out.position) || !std::isfinite(out.velocity))
        throw divergence_error("step_dynamics: state diverged");
    return out;
}

// Effective parameters when several gestures are simultaneously active:
// blending-strength-weighted averages, damping re-derived from the blended k.
inline GestureParams blend_active(std::span<const GestureParams> active) {
    if (active.empty()) throw validation_error("blend_active: no active gestures");
    double w = 0.0, target = 0.0, k = 0.0, d = 0.0;
    for (const auto& p : active) {
        p.validate();
        w += p.blending_strength;
        target += p.blending_strength * p.target;
        k += p.blending_strength * p.stiffness_k;
        d += p.blending_strength * p.cubic_d;
    }
    return GestureParams{target / w, k / w, d / w, 1.0};
}

// Integrates the score over [0, last offset + tail]. While at least one
// gesture is active the state is driven toward the blended target; outside
// any activation the state is held in place with zero velocity (no release
// gesture is modelled).
inline SimOutput simulate_score(const GestureScore& score, const SimulationConfig& config) {
    score.validate();
    config.validate();

    const double span = score.last_offset_s() + config.tail_after_last_offset;
    const auto n_steps = static_cast<std::size_t>(std::floor(span / config.dt + 0.5));

    SimOutput out;
    out.dt = config.dt;
    out.time.reserve(n_steps + 1);
    out.position.reserve(n_steps + 1);
    out.velocity.reserve(n_steps + 1);
    out.active_gesture_count.reserve(n_steps + 1);

    State state{config.initial_position, config.initial_velocity};
    std::vector<GestureParams> active;
    for (std::size_t i = 0; i <= n_steps; ++i) {
        const double t = static_cast<double>(i) * config.dt;
        active.clear();
        for (const auto& g : score.gestures)
            if (t >= g.onset_s && t < g.offset_s()) active.push_back(g.params);

        if (active.empty()) state.velocity = 0.0;

        out.time.push_back(t);
        out.position.push_back(state.position);
        out.velocity.push_back(state.velocity);
        out.active_gesture_count.push_back(static_cast<int>(active.size()));

        if (i == n_steps) break;
        if (!active.empty()) {
            const GestureParams eff = blend_active(active);
            const double x = state.position - eff.target;
            if (eff.cubic_d * x * x >= eff.stiffness_k)
                throw divergence_error("simulate_score: cubic term overwhelms stiffness at t = " +
                                       std::to_string(t) + " s");
            try {
                state = step_dynamics(state, eff, config.dt);
            } catch (const divergence_error&) {
                throw divergence_error("simulate_score: state diverged at t = " +
                                       std::to_string(t) + " s");
            }
        }
    }
    return out;
}

// Shape statistic used for fitting d: time from start to peak speed divided
// by time from start to 90% of the total path length. Peak time is refined
// by a 3-point parabolic fit, the 90% crossing by linear interpolation.
inline double time_to_peak_ratio(const Series& time, const Series& speed) {
    require(time.size() == speed.size() && time.size() >= 3,
            "time_to_peak_ratio: need matching series with >= 3 samples");

    std::size_t ipk = 0;
    for (std::size_t i = 1; i < speed.size(); ++i)
        if (speed[i] > speed[ipk]) ipk = i;
    double t_peak = time[ipk];
    if (ipk > 0 && ipk + 1 < speed.size()) {
        const double denom = speed[ipk - 1] - 2.0 * speed[ipk] + speed[ipk + 1];
        if (denom < 0.0) {
            const double shift = 0.5 * (speed[ipk - 1] - speed[ipk + 1]) / denom;
            t_peak += shift * (time[ipk + 1] - time[ipk]);
        }
    }

    Series path(speed.size(), 0.0);
    for (std::size_t i = 1; i < speed.size(); ++i)
        path[i] = path[i - 1] + 0.5 * (speed[i] + speed[i - 1]) * (time[i] - time[i - 1]);
    const double total = path.back();
    require(total > 0.0, "time_to_peak_ratio: no movement in reference");

    const double thresh = 0.9 * total;
    double t90 = time.back();
    for (std::size_t i = 1; i < path.size(); ++i) {
        if (path[i] >= thresh) {
            const double frac = (thresh - path[i - 1]) / (path[i] - path[i - 1]);
            t90 = time[i - 1] + frac * (time[i] - time[i - 1]);
            break;
        }
    }
    require(t90 > 0.0, "time_to_peak_ratio: degenerate 90% crossing");
    return t_peak / t90;
}

inline double time_to_peak_ratio(const SimOutput& out) {
    return time_to_peak_ratio(out.time, out.speed());
}

// Finds the cubic coefficient whose simulated speed profile matches the
// reference time-to-peak ratio. All gestures in the score share one d.
inline double fit_cubic_d(double reference_ratio, const GestureScore& score,
                          const SimulationConfig& config, double d_lo = 0.0, double d_hi = 0.0) {
    score.validate();
    if (d_hi <= d_lo) {
        double min_k = score.gestures.front().params.stiffness_k;
        for (const auto& g : score.gestures) min_k = std::min(min_k, g.params.stiffness_k);
        d_hi = 0.9 * min_k;
    }
    require(d_lo >= 0.0, "fit_cubic_d: lower bound must be >= 0");
    require(std::isfinite(reference_ratio) && reference_ratio > 0.0,
            "fit_cubic_d: reference ratio must be positive and finite");

    const auto objective = [&](double d) {
        GestureScore trial = score;
        for (auto& g : trial.gestures) g.params.cubic_d = d;
        double ratio;
        try {
            ratio = time_to_peak_ratio(simulate_score(trial, config));
        } catch (const divergence_error& e) {
            throw divergence_error(std::string("fit_cubic_d: objective diverged: ") + e.what());
        }
        const double err = ratio - reference_ratio;
        return err * err;
    };
    return golden_section_minimize(objective, d_lo, d_hi, 1e-6);
}

inline double fit_cubic_d(const SimOutput& reference, const GestureScore& score,
                          const SimulationConfig& config, double d_lo = 0.0, double d_hi = 0.0) {
    return fit_cubic_d(time_to_peak_ratio(reference), score, config, d_lo, d_hi);
}

inline double fit_cubic_d(const Series& ref_time, const Series& ref_speed, const GestureScore& score,
                          const SimulationConfig& config, double d_lo = 0.0, double d_hi = 0.0) {
    return fit_cubic_d(time_to_peak_ratio(ref_time, ref_speed), score, config, d_lo, d_hi);
}

}  // namespace vdyn
