#pragma once

#include "rtvae/data/encoder.hpp"
#include "rtvae/divergences/divergences.hpp"
#include "rtvae/model/vae.hpp"
#include "rtvae/numerics/rng.hpp"
#include "rtvae/numerics/tape.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace rtvae::testing {

/// Entries uniform in [lo, hi).
Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo = -1.0,
                     double hi = 1.0);

/// Builds a scalar graph on `tape` from parameter leaves created in the order
/// of the `params` argument to max_gradient_error.
using GraphBuilder = std::function<NodeId(Tape&, const std::vector<NodeId>&)>;

/// Largest relative error between reverse-mode and central-difference
/// gradients over all parameter tensors. Per tensor the error is
/// ||analytic - numeric||_2 / max(||analytic||_2, ||numeric||_2, 1e-8).
double max_gradient_error(const std::vector<Matrix>& params, const GraphBuilder& build,
                          double h = 1e-5);

/// Same check for the training objective of `arch` on `batch`.
double total_loss_gradient_error(const Architecture& arch, const ModelParams& params,
                                 const Matrix& batch, Beta beta, const Matrix& noise,
                                 double h = 1e-5);

/// Small architecture with random categorical/continuous slots.
Architecture random_architecture(Rng& rng, std::size_t categorical, std::size_t continuous);
/// Rows that are valid encodings under `layout`: one-hot blocks and
/// continuous values in [-2, 2).
Matrix random_encoded_rows(Rng& rng, const FeatureLayout& layout, std::size_t rows);

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

} // namespace rtvae::testing
