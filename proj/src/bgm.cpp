#include "drought/bgm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "drought/error.hpp"
#include "drought/kmeans.hpp"
#include "drought/rng.hpp"

namespace drought {

namespace {

constexpr double kLn2Pi = 1.8378770664093454835606594728112;
constexpr double kLnPi = 1.1447298858494001741434273513531;
constexpr double kLn2 = 0.69314718055994530941723212145818;

double digamma(double x) {
    // asymptotic expansion after shifting x above 6
    double result = 0.0;
    while (x < 6.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
    return result;
}

// log normalizer of the Wishart distribution, ln B(W, nu), given ln|W|
double ln_wishart_b(double ln_det_w, double nu, int d) {
    double sum_lgamma = 0.0;
    for (int i = 1; i <= d; ++i) sum_lgamma += std::lgamma(0.5 * (nu + 1.0 - i));
    return -0.5 * nu * ln_det_w - 0.5 * nu * d * kLn2 - 0.25 * d * (d - 1) * kLnPi - sum_lgamma;
}

struct Priors {
    double alpha0 = 0.0;
    double beta0 = 1.0;
    double nu0 = 0.0;
    Eigen::VectorXd m0;
    Eigen::MatrixXd w0_inv;
    double ln_det_w0 = 0.0;  // ln|W0|
};

}  // namespace

std::vector<int> BgmModel::hard_assignments() const {
    std::vector<int> out(static_cast<std::size_t>(responsibilities.rows()));
    for (Eigen::Index i = 0; i < responsibilities.rows(); ++i) {
        Eigen::Index best = 0;
        responsibilities.row(i).maxCoeff(&best);
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

int BgmModel::effective_components(double weight_floor) const {
    int count = 0;
    for (Eigen::Index k = 0; k < weights.size(); ++k) count += weights(k) > weight_floor ? 1 : 0;
    return count;
}

BgmModel bgm_fit(const Eigen::MatrixXd& X, int k_max, double alpha, std::uint64_t seed,
                 const BgmParams& params) {
    if (!X.allFinite()) throw NumericError("matrix contains non-finite values");
    if (k_max < 1 || static_cast<Eigen::Index>(k_max) > X.rows()) {
        throw NumericError("k_max must be in [1, n_rows]");
    }
    if (alpha <= 0.0) throw ConfigError("alpha must be positive");

    const Eigen::Index n = X.rows();
    const int d = static_cast<int>(X.cols());
    const int K = k_max;

    Priors prior;
    prior.alpha0 = alpha / K;
    prior.beta0 = 1.0;
    prior.nu0 = d;
    prior.m0 = X.colwise().mean();
    // Prior expected precision matches the (regularized) empirical variances;
    // folding reg_covar into the prior keeps the bound exact while keeping
    // every W_k^{-1} positive definite.
    Eigen::VectorXd var = (X.rowwise() - prior.m0.transpose()).array().square().colwise().mean();
    prior.w0_inv = Eigen::MatrixXd::Zero(d, d);
    prior.w0_inv.diagonal() = prior.nu0 * (var.array() + params.reg_covar);
    prior.ln_det_w0 = -prior.w0_inv.diagonal().array().log().sum();

    // initialize responsibilities one-hot from a short K-means run
    Rng master(seed);
    KMeansParams init_params;
    init_params.n_init = 1;
    init_params.max_iter = 10;
    KMeansModel init = kmeans_fit(X, K, master.derive(0), init_params);

    Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(n, K);
    for (Eigen::Index i = 0; i < n; ++i) resp(i, init.assignments[static_cast<std::size_t>(i)]) = 1.0;

    BgmVariationalState st;
    st.alpha.resize(K);
    st.beta.resize(K);
    st.nu.resize(K);
    st.m.resize(K, d);
    st.W.assign(static_cast<std::size_t>(K), Eigen::MatrixXd());
    std::vector<Eigen::MatrixXd> w_inv(static_cast<std::size_t>(K));
    std::vector<double> ln_det_w(static_cast<std::size_t>(K), 0.0);

    Eigen::VectorXd big_n(K);
    Eigen::MatrixXd xbar(K, d);
    std::vector<Eigen::MatrixXd> scatter(static_cast<std::size_t>(K));
    Eigen::VectorXd e_ln_pi(K), e_ln_det_lambda(K);

    std::vector<double> elbo_trace;

    auto m_step = [&]() {
        big_n = resp.colwise().sum();
        for (int k = 0; k < K; ++k) {
            const double nk = big_n(k);
            if (nk > 0.0) {
                xbar.row(k) = (resp.col(k).transpose() * X) / nk;
            } else {
                xbar.row(k) = prior.m0.transpose();
            }
            Eigen::MatrixXd centered = X.rowwise() - xbar.row(k);
            scatter[static_cast<std::size_t>(k)] =
                centered.transpose() * (resp.col(k).asDiagonal() * centered);

            st.alpha(k) = prior.alpha0 + nk;
            st.beta(k) = prior.beta0 + nk;
            st.nu(k) = prior.nu0 + nk;
            st.m.row(k) = (prior.beta0 * prior.m0.transpose() + nk * xbar.row(k)) / st.beta(k);

            Eigen::VectorXd diff = xbar.row(k).transpose() - prior.m0;
            w_inv[static_cast<std::size_t>(k)] =
                prior.w0_inv + scatter[static_cast<std::size_t>(k)] +
                (prior.beta0 * nk / st.beta(k)) * (diff * diff.transpose());

            Eigen::LLT<Eigen::MatrixXd> llt(w_inv[static_cast<std::size_t>(k)]);
            if (llt.info() != Eigen::Success) {
                throw NumericError("Wishart scale update lost positive definiteness");
            }
            ln_det_w[static_cast<std::size_t>(k)] =
                -2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
            st.W[static_cast<std::size_t>(k)] =
                llt.solve(Eigen::MatrixXd::Identity(d, d));
        }
        const double alpha_sum = st.alpha.sum();
        for (int k = 0; k < K; ++k) {
            e_ln_pi(k) = digamma(st.alpha(k)) - digamma(alpha_sum);
            double s = 0.0;
            for (int i = 1; i <= d; ++i) s += digamma(0.5 * (st.nu(k) + 1.0 - i));
            e_ln_det_lambda(k) = s + d * kLn2 + ln_det_w[static_cast<std::size_t>(k)];
        }
    };

    auto compute_elbo = [&]() {
        double elbo = 0.0;
        // E[ln p(X | Z, mu, Lambda)]
        for (int k = 0; k < K; ++k) {
            const double nk = big_n(k);
            const auto& W = st.W[static_cast<std::size_t>(k)];
            const double tr_sw =
                nk > 0.0
                    ? (scatter[static_cast<std::size_t>(k)] * W).trace() / nk
                    : 0.0;
            Eigen::VectorXd diff = xbar.row(k).transpose() - st.m.row(k).transpose();
            const double quad = diff.dot(W * diff);
            elbo += 0.5 * nk *
                    (e_ln_det_lambda(k) - d / st.beta(k) - st.nu(k) * tr_sw -
                     st.nu(k) * quad - d * kLn2Pi);
        }
        // E[ln p(Z | pi)] - E[ln q(Z)]
        for (Eigen::Index i = 0; i < n; ++i) {
            for (int k = 0; k < K; ++k) {
                const double r = resp(i, k);
                if (r > 0.0) elbo += r * (e_ln_pi(k) - std::log(r));
            }
        }
        // E[ln p(pi)] - E[ln q(pi)]
        elbo += std::lgamma(K * prior.alpha0) - K * std::lgamma(prior.alpha0);
        elbo += (prior.alpha0 - 1.0) * e_ln_pi.sum();
        double ln_c_alpha = std::lgamma(st.alpha.sum());
        for (int k = 0; k < K; ++k) ln_c_alpha -= std::lgamma(st.alpha(k));
        elbo -= ln_c_alpha;
        for (int k = 0; k < K; ++k) elbo -= (st.alpha(k) - 1.0) * e_ln_pi(k);
        // E[ln p(mu, Lambda)] - E[ln q(mu, Lambda)]
        for (int k = 0; k < K; ++k) {
            const auto& W = st.W[static_cast<std::size_t>(k)];
            Eigen::VectorXd diff = st.m.row(k).transpose() - prior.m0;
            elbo += 0.5 * (d * std::log(prior.beta0 / (2.0 * M_PI)) + e_ln_det_lambda(k) -
                           d * prior.beta0 / st.beta(k) -
                           prior.beta0 * st.nu(k) * diff.dot(W * diff));
            elbo += ln_wishart_b(prior.ln_det_w0, prior.nu0, d);
            elbo += 0.5 * (prior.nu0 - d - 1.0) * e_ln_det_lambda(k);
            elbo -= 0.5 * st.nu(k) * (prior.w0_inv * W).trace();

            const double entropy_wishart =
                -ln_wishart_b(ln_det_w[static_cast<std::size_t>(k)], st.nu(k), d) -
                0.5 * (st.nu(k) - d - 1.0) * e_ln_det_lambda(k) + 0.5 * st.nu(k) * d;
            elbo -= 0.5 * e_ln_det_lambda(k) + 0.5 * d * std::log(st.beta(k) / (2.0 * M_PI)) -
                    0.5 * d - entropy_wishart;
        }
        return elbo;
    };

    auto e_step = [&]() {
        Eigen::MatrixXd log_rho(n, K);
        for (int k = 0; k < K; ++k) {
            const auto& W = st.W[static_cast<std::size_t>(k)];
            Eigen::MatrixXd centered = X.rowwise() - st.m.row(k);
            Eigen::VectorXd quad = ((centered * W).array() * centered.array()).rowwise().sum();
            log_rho.col(k) =
                (e_ln_pi(k) + 0.5 * e_ln_det_lambda(k) - 0.5 * d * kLn2Pi -
                 0.5 * d / st.beta(k)) -
                (0.5 * st.nu(k)) * quad.array();
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const double mx = log_rho.row(i).maxCoeff();
            Eigen::ArrayXd ex = (log_rho.row(i).array() - mx).exp();
            resp.row(i) = ex / ex.sum();
        }
    };

    double prev_elbo = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < params.max_iter; ++iter) {
        m_step();
        const double elbo = compute_elbo();
        elbo_trace.push_back(elbo);
        if (iter > 0 && elbo - prev_elbo < params.tol && elbo - prev_elbo > -1e-8) break;
        prev_elbo = elbo;
        e_step();
    }

    BgmModel model;
    model.k_max = K;
    model.alpha = alpha;
    model.seed = seed;
    model.elbo_trace = std::move(elbo_trace);
    model.responsibilities = std::move(resp);
    model.weights = st.alpha / st.alpha.sum();
    model.means = st.m;
    model.covariances.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        // expected covariance = (nu_k W_k)^{-1}
        Eigen::MatrixXd cov = w_inv[static_cast<std::size_t>(k)] / st.nu(k);
        cov.diagonal().array() += params.reg_covar;
        model.covariances[static_cast<std::size_t>(k)] = 0.5 * (cov + cov.transpose());
    }
    model.state = std::move(st);
    return model;
}

}  // namespace drought
