#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "vdyn/common.hpp"

namespace vdyn {

enum class PhaseRelation { None, InPhase, AntiPhase };

inline double wrap_phase(double phi) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(phi, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
}

// Shortest angular distance between two phases, in [0, pi].
inline double circular_distance(double a, double b) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double d = wrap_phase(a - b);
    return std::min(d, two_pi - d);
}

// Planar oscillator network: theta_i' = 2*pi*f_i + sum_j C_ij sin(theta_i - theta_j).
// Couplings are declared by the phase relation a pair should reach; the sign
// that stabilizes that relation under the dynamics above is applied
// internally (in-phase needs C < 0, anti-phase C > 0).
struct CouplingGraph {
    int n = 0;
    std::vector<double> frequency_hz;
    std::vector<std::vector<double>> coupling;
    std::vector<std::vector<PhaseRelation>> relations;

    static CouplingGraph make(int n_oscillators, double freq_hz = 4.0) {
        require(n_oscillators >= 1, "coupling graph needs at least one oscillator");
        CouplingGraph g;
        g.n = n_oscillators;
        g.frequency_hz.assign(static_cast<std::size_t>(n_oscillators), freq_hz);
        g.coupling.assign(static_cast<std::size_t>(n_oscillators),
                          std::vector<double>(static_cast<std::size_t>(n_oscillators), 0.0));
        g.relations.assign(static_cast<std::size_t>(n_oscillators),
                           std::vector<PhaseRelation>(static_cast<std::size_t>(n_oscillators),
                                                      PhaseRelation::None));
        return g;
    }

    void set_pair(int i, int j, PhaseRelation relation, double strength = 2.0) {
        require(i >= 0 && i < n && j >= 0 && j < n && i != j, "set_pair: bad oscillator index");
        require(strength > 0.0, "set_pair: strength must be > 0");
        double c = 0.0;
        if (relation == PhaseRelation::InPhase) c = -strength;
        if (relation == PhaseRelation::AntiPhase) c = strength;
        const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
        coupling[ui][uj] = coupling[uj][ui] = c;
        relations[ui][uj] = relations[uj][ui] = relation;
    }

    void validate() const {
        require(n >= 1 && frequency_hz.size() == static_cast<std::size_t>(n) &&
                    coupling.size() == static_cast<std::size_t>(n) &&
                    relations.size() == static_cast<std::size_t>(n),
                "coupling graph shape mismatch");
        for (double f : frequency_hz) require(f > 0.0, "oscillator frequency must be > 0");
        for (std::size_t i = 0; i < coupling.size(); ++i) {
            require(coupling[i].size() == static_cast<std::size_t>(n) &&
                        relations[i].size() == static_cast<std::size_t>(n),
                    "coupling graph shape mismatch");
            require(coupling[i][i] == 0.0, "coupling diagonal must be zero");
            for (std::size_t j = 0; j < coupling[i].size(); ++j) {
                const double c = coupling[i][j];
                switch (relations[i][j]) {
                    case PhaseRelation::None:
                        require(c == 0.0, "undeclared pair must have zero coupling");
                        break;
                    case PhaseRelation::InPhase:
                        require(c < 0.0, "in-phase pair must have stabilizing (negative) coupling");
                        break;
                    case PhaseRelation::AntiPhase:
                        require(c > 0.0, "anti-phase pair must have stabilizing (positive) coupling");
                        break;
                }
            }
        }
    }
};

struct PhaseSolution {
    std::vector<std::vector<double>> settled_phase_rad;  // theta_i - theta_j, wrapped to [0, 2pi)
    std::vector<std::vector<double>> lags_s;             // settled phase / (2*pi*f_pair)
    std::vector<double> frequency_hz;
    bool converged = false;
    int iterations = 0;
};

// Integrates the network until every pairwise relative phase changes by less
// than tol_rad over one period of the slowest oscillator, or time runs out.
inline PhaseSolution integrate_oscillators(const CouplingGraph& graph,
                                           std::vector<double> phases_rad,
                                           double dt = 0.001, double max_time_s = 10.0,
                                           double tol_rad = 1e-6) {
    graph.validate();
    require(phases_rad.size() == static_cast<std::size_t>(graph.n),
            "initial phases must match oscillator count");
    for (double p : phases_rad) require(std::isfinite(p), "initial phases must be finite");
    require(dt > 0.0 && max_time_s > 0.0 && tol_rad > 0.0,
            "integration parameters must be positive");

    const auto n = static_cast<std::size_t>(graph.n);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    const auto deriv = [&](const std::vector<double>& th, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            double v = two_pi * graph.frequency_hz[i];
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && graph.coupling[i][j] != 0.0)
                    v += graph.coupling[i][j] * std::sin(th[i] - th[j]);
            out[i] = v;
        }
    };

    double min_f = graph.frequency_hz[0];
    for (double f : graph.frequency_hz) min_f = std::min(min_f, f);
    const auto period_steps = static_cast<std::size_t>(std::llround(1.0 / (min_f * dt)));
    require(period_steps >= 1, "dt too coarse to resolve one oscillator period");
    const auto max_steps = static_cast<std::size_t>(std::llround(max_time_s / dt));

    const std::size_t n_pairs = n * (n - 1) / 2;
    std::vector<std::vector<double>> history(period_steps + 1, std::vector<double>(n_pairs, 0.0));
    const auto record_pairs = [&](const std::vector<double>& th, std::vector<double>& slot) {
        std::size_t p = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) slot[p++] = wrap_phase(th[i] - th[j]);
    };

    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    PhaseSolution sol;
    sol.frequency_hz = graph.frequency_hz;

    record_pairs(phases_rad, history[0]);
    std::size_t step = 0;
    for (; step < max_steps; ++step) {
        deriv(phases_rad, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = phases_rad[i] + 0.5 * dt * k1[i];
        deriv(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = phases_rad[i] + 0.5 * dt * k2[i];
        deriv(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = phases_rad[i] + dt * k3[i];
        deriv(tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            phases_rad[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        auto& slot = history[(step + 1) % history.size()];
        record_pairs(phases_rad, slot);
        if (step + 1 >= period_steps) {
            const auto& ago = history[(step + 2) % history.size()];  // one period back
            double worst = 0.0;
            for (std::size_t p = 0; p < n_pairs; ++p)
                worst = std::max(worst, circular_distance(slot[p], ago[p]));
            if (worst < tol_rad || n_pairs == 0) {
                sol.converged = true;
                ++step;
                break;
            }
        }
    }
    sol.iterations = static_cast<int>(std::min(step, max_steps));
    if (n_pairs == 0) sol.converged = true;

    sol.settled_phase_rad.assign(n, std::vector<double>(n, 0.0));
    sol.lags_s.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double phi = wrap_phase(phases_rad[i] - phases_rad[j]);
            const double f_pair = 0.5 * (graph.frequency_hz[i] + graph.frequency_hz[j]);
            sol.settled_phase_rad[i][j] = phi;
            sol.lags_s[i][j] = phi / (two_pi * f_pair);
        }
    }
    return sol;
}

struct ActivationInterval {
    double onset_s = 0.0;
    double offset_s = 0.0;
};

// Onset of gesture i is its settled lag behind gesture 0, re-expressed in
// (-T/2, T/2] so that near-zero phases mean simultaneity rather than a full
// period; the whole schedule is then shifted so the earliest onset is 0.
inline std::vector<ActivationInterval> schedule_from_phases(
    const PhaseSolution& solution, const std::vector<double>& activation_duration_s) {
    require(solution.converged, "schedule_from_phases: unconverged phase solution");
    const std::size_t n = solution.frequency_hz.size();
    require(n >= 1 && activation_duration_s.size() == n,
            "schedule_from_phases: need one duration per oscillator");
    for (double d : activation_duration_s) require(d > 0.0, "activation durations must be > 0");

    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> onsets(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        double phi = solution.settled_phase_rad[i][0];
        if (phi > std::numbers::pi) phi -= two_pi;
        const double f_pair = 0.5 * (solution.frequency_hz[i] + solution.frequency_hz[0]);
        onsets[i] = phi / (two_pi * f_pair);
    }
    double first = 0.0;
    for (double o : onsets) first = std::min(first, o);

    std::vector<ActivationInterval> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].onset_s = onsets[i] - first;
        out[i].offset_s = out[i].onset_s + activation_duration_s[i];
    }
    return out;
}

}  // namespace vdyn
