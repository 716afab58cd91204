#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace drought {

// Variational posterior over mixture parameters (Dirichlet over weights,
// Gaussian-Wishart over each component's mean and precision).
struct BgmVariationalState {
    Eigen::VectorXd alpha;              // Dirichlet concentrations, one per component
    Eigen::VectorXd beta;               // mean-precision scale
    Eigen::VectorXd nu;                 // Wishart degrees of freedom
    Eigen::MatrixXd m;                  // k x d posterior means
    std::vector<Eigen::MatrixXd> W;     // Wishart scale matrices
};

struct BgmModel {
    int k_max = 0;
    Eigen::VectorXd weights;            // expected mixing coefficients, sum to 1
    Eigen::MatrixXd means;              // k x d
    std::vector<Eigen::MatrixXd> covariances;  // expected covariance per component
    double alpha = 0.0;                 // prior concentration
    std::vector<double> elbo_trace;
    Eigen::MatrixXd responsibilities;   // n x k, rows sum to 1
    BgmVariationalState state;
    std::uint64_t seed = 0;

    std::vector<int> hard_assignments() const;
    int effective_components(double weight_floor = 0.02) const;
};

struct BgmParams {
    int max_iter = 200;
    double tol = 1e-5;        // ELBO improvement stop
    double reg_covar = 1e-6;  // added to covariance diagonals
    double weight_floor = 0.02;
};

BgmModel bgm_fit(const Eigen::MatrixXd& X, int k_max, double alpha, std::uint64_t seed,
                 const BgmParams& params = {});

}  // namespace drought
