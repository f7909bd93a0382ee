#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace rbheat {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct PowerIterationOptions {
  double rel_tol = 1e-10;
  int max_iter = 10000;
};

/// Spectral norm (largest singular value) by power iteration on the Gram
/// matrix A^T A with a deterministic start vector. Iterating the Gram matrix
/// also sidesteps the sign flip of dominant +/- eigenvalue pairs of
/// symmetric indefinite matrices.
double spectral_norm(const SpMat& a, PowerIterationOptions opt = {});

/// Largest eigenvalue of a symmetric positive semidefinite sparse matrix.
double lambda_max_spd(const SpMat& a, PowerIterationOptions opt = {});

/// Smallest eigenvalue of a symmetric positive definite sparse matrix by
/// inverse power iteration (sparse Cholesky applied per sweep).
double lambda_min_spd(const SpMat& a, PowerIterationOptions opt = {});

/// Spectral norm of E^{-1} A for symmetric A and symmetric positive definite
/// E, via power iteration on (E^{-1}A)^T (E^{-1}A).
double spectral_norm_einv_a(const SpMat& e, const SpMat& a,
                            PowerIterationOptions opt = {});

/// Largest entrywise absolute difference between two sparse matrices.
double max_abs_diff(const SpMat& a, const SpMat& b);

/// Largest entrywise absolute value.
double max_abs(const SpMat& a);

}  // namespace rbheat
