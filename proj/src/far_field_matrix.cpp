#include "scatterbound/far_field_matrix.hpp"

#include "scatterbound/errors.hpp"

namespace scatterbound {

FarFieldMatrix::FarFieldMatrix(WaveContext c, DirectionSet d, Eigen::MatrixXcd u,
                               std::optional<ContrastField> q)
    : ctx(c), dirs(std::move(d)), kernel(std::move(u)), contrast(std::move(q)) {
  if (kernel.rows() != dirs.size() || kernel.cols() != dirs.size()) {
    throw PreconditionError("far field kernel must be n x n for n directions");
  }
}

}  // namespace scatterbound
