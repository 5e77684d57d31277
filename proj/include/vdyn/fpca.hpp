#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vdyn/common.hpp"

namespace vdyn {

// Principal component decomposition of time-normalized curves sampled on a
// shared grid. Eigenvalues are population variances of the scores.
struct FpcaModel {
    int grid_size = 101;
    Series mean_curve;
    std::vector<Series> components;  // orthonormal rows
    Series eigenvalues;              // per retained component
    std::vector<Series> scores;      // per training curve, per retained component
    Series variance_explained;       // fraction of total variance, per retained component

    int n_components() const { return static_cast<int>(components.size()); }
};

// Mean-centers the curve matrix and decomposes it by SVD. Components are
// right singular vectors with the sign flipped so each component's
// largest-magnitude element is positive. Components are retained until
// their cumulative variance fraction reaches retain_fraction.
inline FpcaModel fpca_fit(const std::vector<Series>& curves, double retain_fraction = 0.99) {
    require(curves.size() >= 2, "fpca_fit: need at least 2 curves");
    require(retain_fraction > 0.0 && retain_fraction <= 1.0,
            "fpca_fit: retain_fraction must lie in (0, 1]");
    const std::size_t p = curves.front().size();
    require(p >= 2, "fpca_fit: curves must have at least 2 samples");
    for (const auto& c : curves) {
        require(c.size() == p, "fpca_fit: curves differ in length");
        require(all_finite(c), "fpca_fit: non-finite curve sample");
    }
    const std::size_t n = curves.size();

    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j)
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = curves[i][j];

    const Eigen::RowVectorXd mu = X.colwise().mean();
    Eigen::MatrixXd Xc = X.rowwise() - mu;

    FpcaModel model;
    model.grid_size = static_cast<int>(p);
    model.mean_curve.assign(mu.data(), mu.data() + p);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(Xc, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? sv(0) * 1e-12 : 0.0;

    int rank = 0;
    double total_var = 0.0;
    for (Eigen::Index j = 0; j < sv.size(); ++j) {
        if (sv(j) > cutoff && sv(j) > 0.0) {
            ++rank;
            total_var += sv(j) * sv(j);
        }
    }
    if (rank == 0 || total_var == 0.0) {
        model.scores.assign(n, Series{});
        return model;
    }

    int keep = rank;
    if (retain_fraction < 1.0) {
        double cum = 0.0;
        for (int j = 0; j < rank; ++j) {
            cum += sv(j) * sv(j) / total_var;
            if (cum >= retain_fraction) {
                keep = j + 1;
                break;
            }
        }
    }

    Eigen::MatrixXd V = svd.matrixV().leftCols(keep);
    for (int j = 0; j < keep; ++j) {
        Eigen::Index imax = 0;
        V.col(j).cwiseAbs().maxCoeff(&imax);
        if (V(imax, j) < 0.0) V.col(j) = -V.col(j);
    }
    const Eigen::MatrixXd S = Xc * V;  // scores, identical arithmetic to fpca_project

    model.components.resize(static_cast<std::size_t>(keep));
    model.eigenvalues.resize(static_cast<std::size_t>(keep));
    model.variance_explained.resize(static_cast<std::size_t>(keep));
    for (int j = 0; j < keep; ++j) {
        auto& comp = model.components[static_cast<std::size_t>(j)];
        comp.resize(p);
        for (std::size_t g = 0; g < p; ++g) comp[g] = V(static_cast<Eigen::Index>(g), j);
        model.eigenvalues[static_cast<std::size_t>(j)] =
            sv(j) * sv(j) / static_cast<double>(n);
        model.variance_explained[static_cast<std::size_t>(j)] = sv(j) * sv(j) / total_var;
    }
    model.scores.assign(n, Series(static_cast<std::size_t>(keep), 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < keep; ++j)
            model.scores[i][static_cast<std::size_t>(j)] = S(static_cast<Eigen::Index>(i), j);
    return model;
}

// Inner products of the centered curve with each retained component.
inline Series fpca_project(const FpcaModel& model, const Series& curve) {
    require(curve.size() == model.mean_curve.size(),
            "fpca_project: curve length does not match the model grid");
    Series scores(model.components.size(), 0.0);
    for (std::size_t j = 0; j < model.components.size(); ++j) {
        double s = 0.0;
        for (std::size_t g = 0; g < curve.size(); ++g)
            s += (curve[g] - model.mean_curve[g]) * model.components[j][g];
        scores[j] = s;
    }
    return scores;
}

// mean + sum of the first n_components score-weighted components.
inline Series fpca_reconstruct(const FpcaModel& model, const Series& scores, int n_components) {
    require(n_components >= 0 && n_components <= model.n_components(),
            "fpca_reconstruct: n_components exceeds the model");
    require(scores.size() >= static_cast<std::size_t>(n_components),
            "fpca_reconstruct: fewer scores than requested components");
    Series curve = model.mean_curve;
    for (int j = 0; j < n_components; ++j)
        for (std::size_t g = 0; g < curve.size(); ++g)
            curve[g] += scores[static_cast<std::size_t>(j)] * model.components[static_cast<std::size_t>(j)][g];
    return curve;
}

// mean + m*sqrt(eigenvalue)*component for each multiplier m.
inline std::vector<Series> perturbation_curves(const FpcaModel& model, int component_index,
                                               const Series& multipliers = {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    require(component_index >= 0 && component_index < model.n_components(),
            "perturbation_curves: no such component");
    const auto& comp = model.components[static_cast<std::size_t>(component_index)];
    const double scale = std::sqrt(model.eigenvalues[static_cast<std::size_t>(component_index)]);
    std::vector<Series> family;
    family.reserve(multipliers.size());
    for (double m : multipliers) {
        Series curve = model.mean_curve;
        for (std::size_t g = 0; g < curve.size(); ++g) curve[g] += m * scale * comp[g];
        family.push_back(std::move(curve));
    }
    return family;
}

}  // namespace vdyn
