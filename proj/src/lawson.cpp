#include "levlab/lawson.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace levlab {

namespace {

double weighted_sup(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& y, const Eigen::VectorXd& w,
                    const Eigen::VectorXcd& c, Eigen::VectorXd& err) {
    const Eigen::VectorXcd r = y - A * c;
    err = (r.array().abs() * w.array()).matrix();
    return err.size() ? err.maxCoeff() : 0.0;
}

} // namespace

WeightedFit lawson_fit(std::size_t rows, std::size_t cols, const std::vector<Complex>& A_flat,
                       const std::vector<Complex>& y_in, const std::vector<double>& w_in, int iterations,
                       const std::vector<Complex>& warm_start) {
    if (cols == 0) throw ArgumentError("weighted fit: no basis functions");
    if (A_flat.size() != rows * cols || y_in.size() != rows || w_in.size() != rows)
        throw ArgumentError("weighted fit: inconsistent sizes");
    if (warm_start.size() > cols) throw ArgumentError("weighted fit: warm start longer than the basis");

    Eigen::MatrixXcd A(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) A(Eigen::Index(i), Eigen::Index(j)) = A_flat[i * cols + j];
    Eigen::VectorXcd y(rows);
    Eigen::VectorXd w(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        y(Eigen::Index(i)) = y_in[i];
        w(Eigen::Index(i)) = w_in[i];
    }

    WeightedFit best;
    Eigen::VectorXd err;
    Eigen::VectorXcd cbest = Eigen::VectorXcd::Zero(Eigen::Index(cols));
    double rbest = weighted_sup(A, y, w, cbest, err);
    if (!warm_start.empty()) {
        Eigen::VectorXcd c0 = Eigen::VectorXcd::Zero(Eigen::Index(cols));
        for (std::size_t j = 0; j < warm_start.size(); ++j) c0(Eigen::Index(j)) = warm_start[j];
        const double r0 = weighted_sup(A, y, w, c0, err);
        if (r0 < rbest) {
            rbest = r0;
            cbest = c0;
        }
    }

    Eigen::VectorXd u = Eigen::VectorXd::Constant(Eigen::Index(rows), 1.0);
    int it = 0;
    for (; it < std::max(1, iterations); ++it) {
        const Eigen::VectorXd s = (u.array().sqrt() * w.array()).matrix();
        const Eigen::MatrixXcd As = s.asDiagonal() * A;
        const Eigen::VectorXcd ys = s.asDiagonal() * y;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(As);
        const Eigen::VectorXcd c = cod.solve(ys);
        if (it == 0) {
            best.rank = std::size_t(cod.rank());
            best.regularized = cod.rank() < Eigen::Index(cols);
        }
        if (!c.allFinite()) break;
        const double r = weighted_sup(A, y, w, c, err);
        if (r < rbest) {
            rbest = r;
            cbest = c;
        }
        const double total = (u.array() * err.array()).sum();
        if (!(total > 0.0)) break;
        u = (u.array() * err.array() / total).matrix();
        // keep every row alive so the next solve stays well posed
        const double floor = 1e-14 * u.maxCoeff();
        u = u.cwiseMax(floor);
    }
    best.iterations = it;
    best.residual = rbest;
    best.coeffs.resize(cols);
    for (std::size_t j = 0; j < cols; ++j) best.coeffs[j] = cbest(Eigen::Index(j));
    return best;
}

} // namespace levlab
