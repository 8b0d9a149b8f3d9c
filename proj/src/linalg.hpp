#pragma once

#include <Eigen/Core>

namespace mtm::detail {

struct SymEig {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns, empty if not requested
};

/// Eigenpairs of a symmetric matrix with eigenvalue in (lower, upper].
SymEig sym_eig_by_value(const Eigen::MatrixXd& a, double lower, double upper, bool vectors);

/// Eigenpairs first..last (1-based, ascending order).
SymEig sym_eig_by_index(const Eigen::MatrixXd& a, int first, int last, bool vectors);

}  // namespace mtm::detail
