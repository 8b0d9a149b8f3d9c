#pragma once

#include <Eigen/Core>

#include "mtm/grid_fields.hpp"

namespace mtm::detail {

/// Profile samples shared by the operator builders.
struct SolitonData {
    SolitonData(double omega, const Grid& grid);
    CVec U, dU;
    RVec f;   // |U|^2
    CVec g;   // conj(U) U'
    RVec df;  // (|U|^2)' = 2 Re g
};

/// Dense complex matrix of  -second d^2/dx^2 + i first(x) d/dx + diagonal(x).
/// `first` may be empty; `first_prime` is its x-derivative.
Eigen::MatrixXcd local_operator(const Grid& grid, const Eigen::MatrixXd& d1, const Eigen::MatrixXd& d2,
                                double second, const RVec& first, const RVec& first_prime,
                                const CVec& diagonal);

/// Realisation of [[P, Q], [conj Q, conj P]] acting on (w, conj w), w with
/// `components` complex blocks of length n, into [Re w_0 | Im w_0 | ...].
Eigen::MatrixXd realify_operator(const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& q, int components, int n);

/// Replaces m by (m + m^T)/2 and returns max |m - m^T| before the change.
double symmetrize(Eigen::MatrixXd& m);

}  // namespace mtm::detail
