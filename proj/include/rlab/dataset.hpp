#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rlab/matrix.hpp"

namespace rlab {

enum class Provenance { GaussianToy, Sphere, IdxFile, Csv };

struct GeneratorParams {
    double sigma = 0.0;
    double delta = 0.0;
    std::uint64_t seed = 0;
};

struct LabeledDataset {
    Matrix inputs;               // n x d
    std::vector<int> labels;     // values in [0, num_classes)
    int d = 0;
    int n = 0;
    int num_classes = 2;
    Provenance provenance = Provenance::GaussianToy;
    GeneratorParams params;
};

/// Two symmetric Gaussian blobs on the first axis: x | y ~ N(y * delta * e1,
/// sigma^2 I_d) with y in {-1, +1} stored as labels {0, 1}. Labels alternate,
/// so the class counts differ by at most one and any prefix stays balanced.
LabeledDataset gen_gaussian_toy(int d, int n, double sigma, double delta,
                                std::uint64_t seed);

// Rows uniform on the unit sphere S^{d-1} (normalized Gaussians).
Matrix gen_sphere_uniform(int d, int n, std::uint64_t seed);

// IDX ingestion (big-endian headers, magic 2051 / 2049). Pixels scaled by
// 1/255 into [0,1], images flattened to d = rows * cols. limit = 0 reads all.
LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path, std::size_t limit = 0);

// Writes the same encoding load_idx reads; values must already be in [0,1].
void save_idx(const LabeledDataset& ds, int img_rows, int img_cols,
              const std::string& images_path, const std::string& labels_path);

// Header `x0,...,x{d-1},label`, decimal floats, integer label.
LabeledDataset load_csv(const std::string& path);

// Disjoint, exhaustive, seeded-shuffle split.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds,
                                                double train_fraction,
                                                std::uint64_t seed);

enum class MeasureKind { GaussianIsotropic, SphereUniform, GaussianMixture };

struct MeasureSpec {
    MeasureKind kind = MeasureKind::GaussianIsotropic;
    int d = 1;
    double sigma2 = 1.0;       // per-coordinate variance (gaussian kinds)
    double delta = 1.0;        // class separation (mixture)
    // sigma^2 * d for Gaussian measures; the sphere's constant is O(1).
    double nominal_c() const {
        return kind == MeasureKind::SphereUniform ? 1.0 : sigma2 * d;
    }
};

// n rows drawn from the measure's marginal on R^d.
Matrix sample_measure(const MeasureSpec& measure, int n, std::uint64_t seed);

}  // namespace rlab
