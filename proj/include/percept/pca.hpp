#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace percept {

// Centered PCA model: orthonormal components as columns of a p x r matrix.
struct PcaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd components;

    int input_dim() const { return static_cast<int>(components.rows()); }
    int output_dim() const { return static_cast<int>(components.cols()); }
};

// Fits PCA by eigendecomposition of the sample covariance. When the ambient
// dimension exceeds the number of rows the dual (Gram) form is used, which
// yields the same leading eigenvectors without forming the p x p covariance.
inline PcaModel fit_pca(const Eigen::MatrixXd& rows, int r) {
    const int n = static_cast<int>(rows.rows());
    const int p = static_cast<int>(rows.cols());
    if (r < 1 || r > std::min(n, p))
        throw std::invalid_argument("fit_pca: need 1 <= r <= min(rows, cols)");

    PcaModel model;
    model.mean = rows.colwise().mean();
    Eigen::MatrixXd centered = rows.rowwise() - model.mean.transpose();
    const double denom = std::max(1, n - 1);

    model.components.resize(p, r);
    if (p <= n) {
        Eigen::MatrixXd cov = centered.transpose() * centered / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        if (eig.info() != Eigen::Success)
            throw std::runtime_error("fit_pca: eigendecomposition failed");
        // eigenvalues come back ascending; take the top r
        for (int j = 0; j < r; ++j) model.components.col(j) = eig.eigenvectors().col(p - 1 - j);
    } else {
        Eigen::MatrixXd gram = centered * centered.transpose() / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        if (eig.info() != Eigen::Success)
            throw std::runtime_error("fit_pca: eigendecomposition failed");
        for (int j = 0; j < r; ++j) {
            const double lambda = eig.eigenvalues()(n - 1 - j);
            if (lambda <= 0.0)
                throw std::invalid_argument("fit_pca: rank of data below requested r");
            Eigen::VectorXd v = centered.transpose() * eig.eigenvectors().col(n - 1 - j);
            model.components.col(j) = v / v.norm();
        }
    }
    return model;
}

inline Eigen::VectorXd pca_project(const PcaModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.mean.size())
        throw std::invalid_argument("pca_project: dimension mismatch");
    return model.components.transpose() * (x - model.mean);
}

inline Eigen::MatrixXd pca_project_rows(const PcaModel& model, const Eigen::MatrixXd& rows) {
    if (rows.cols() != model.mean.size())
        throw std::invalid_argument("pca_project_rows: dimension mismatch");
    return (rows.rowwise() - model.mean.transpose()) * model.components;
}

inline Eigen::VectorXd pca_reconstruct(const PcaModel& model, const Eigen::VectorXd& z) {
    return model.mean + model.components * z;
}

}  // namespace percept
