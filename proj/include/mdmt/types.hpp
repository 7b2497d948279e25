#pragma once

#include <Eigen/Core>

namespace mdmt {

// Batches are row-major in the API sense: one sample per row.
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

}  // namespace mdmt
