#include "linalg.hpp"

#include <string>
#include <vector>

#include <lapacke.h>

#include "mtm/errors.hpp"

namespace mtm::detail {
namespace {

SymEig run_dsyevr(const Eigen::MatrixXd& a, char range, double vl, double vu, int il, int iu, bool vectors) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    if (a.cols() != n) throw ArgumentError("symmetric eigensolve needs a square matrix");
    SymEig out;
    if (n == 0) return out;
    Eigen::MatrixXd work = a;  // dsyevr destroys its input
    std::vector<double> w(n);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    const lapack_int cols = range == 'I' ? iu - il + 1 : n;
    Eigen::MatrixXd z;
    if (vectors) z.resize(n, cols);
    const lapack_int info =
        LAPACKE_dsyevr(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', range, 'U', n, work.data(), n, vl, vu, il, iu, 0.0,
                       &found, w.data(), vectors ? z.data() : nullptr, n, support.data());
    if (info != 0) throw NumericalError("dsyevr failed with info = " + std::to_string(info));
    out.values = Eigen::Map<Eigen::VectorXd>(w.data(), found);
    if (vectors) out.vectors = z.leftCols(found);
    return out;
}

}  // namespace

SymEig sym_eig_by_value(const Eigen::MatrixXd& a, double lower, double upper, bool vectors) {
    if (!(lower < upper)) throw ArgumentError("empty eigenvalue window");
    return run_dsyevr(a, 'V', lower, upper, 0, 0, vectors);
}

SymEig sym_eig_by_index(const Eigen::MatrixXd& a, int first, int last, bool vectors) {
    if (first < 1 || last < first || last > a.rows()) throw ArgumentError("eigenvalue index range out of bounds");
    return run_dsyevr(a, 'I', 0.0, 0.0, first, last, vectors);
}

}  // namespace mtm::detail
