#include "rlab/dataset.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rlab/rng.hpp"

namespace rlab {

LabeledDataset gen_gaussian_toy(int d, int n, double sigma, double delta,
                                std::uint64_t seed) {
    if (d < 1) throw std::invalid_argument("gen_gaussian_toy: d must be >= 1");
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("gen_gaussian_toy: n must be even");
    if (sigma <= 0.0) throw std::invalid_argument("gen_gaussian_toy: sigma must be > 0");
    LabeledDataset ds;
    ds.d = d;
    ds.n = n;
    ds.num_classes = 2;
    ds.provenance = Provenance::GaussianToy;
    ds.params = {sigma, delta, seed};
    ds.inputs = Matrix(n, d);
    ds.labels.resize(n);
    Rng rng(derive_seed(seed, 0x67617573ULL));
    for (int i = 0; i < n; ++i) {
        const int y = i % 2;  // alternate so class counts stay balanced
        const double sign = y == 1 ? 1.0 : -1.0;
        double* row = ds.inputs.row(i);
        for (int j = 0; j < d; ++j) row[j] = sigma * rng.normal();
        row[0] += sign * delta;
        ds.labels[i] = y;
    }
    return ds;
}

Matrix gen_sphere_uniform(int d, int n, std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("gen_sphere_uniform: d must be >= 2");
    Matrix m(n, d);
    Rng rng(derive_seed(seed, 0x73706872ULL));
    for (int i = 0; i < n; ++i) {
        double* row = m.row(i);
        double norm_sq = 0.0;
        do {
            norm_sq = 0.0;
            for (int j = 0; j < d; ++j) {
                row[j] = rng.normal();
                norm_sq += row[j] * row[j];
            }
        } while (norm_sq == 0.0);
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (int j = 0; j < d; ++j) row[j] *= inv;
    }
    return m;
}

namespace {

std::uint32_t read_be_u32(std::istream& in, const std::string& what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw std::runtime_error("idx: truncated " + what);
    }
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_be_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {
        static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
        static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path, std::size_t limit) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw std::runtime_error("idx: cannot open " + images_path);
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw std::runtime_error("idx: cannot open " + labels_path);

    const std::uint32_t img_magic = read_be_u32(img, "image header");
    if (img_magic != 2051) throw std::runtime_error("idx: bad image magic");
    const std::uint32_t img_count = read_be_u32(img, "image header");
    const std::uint32_t rows = read_be_u32(img, "image header");
    const std::uint32_t cols = read_be_u32(img, "image header");

    const std::uint32_t lab_magic = read_be_u32(lab, "label header");
    if (lab_magic != 2049) throw std::runtime_error("idx: bad label magic");
    const std::uint32_t lab_count = read_be_u32(lab, "label header");

    if (img_count != lab_count) {
        throw std::runtime_error("idx: image/label count mismatch");
    }
    std::size_t n = img_count;
    if (limit > 0) n = std::min<std::size_t>(n, limit);
    const std::size_t d = std::size_t(rows) * cols;

    LabeledDataset ds;
    ds.d = static_cast<int>(d);
    ds.n = static_cast<int>(n);
    ds.num_classes = 10;
    ds.provenance = Provenance::IdxFile;
    ds.inputs = Matrix(n, d);
    ds.labels.resize(n);

    std::vector<unsigned char> pixel_row(d);
    for (std::size_t i = 0; i < n; ++i) {
        if (!img.read(reinterpret_cast<char*>(pixel_row.data()),
                      static_cast<std::streamsize>(d))) {
            throw std::runtime_error("idx: truncated image data");
        }
        double* row = ds.inputs.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            row[j] = static_cast<double>(pixel_row[j]) / 255.0;
        }
        unsigned char y;
        if (!lab.read(reinterpret_cast<char*>(&y), 1)) {
            throw std::runtime_error("idx: truncated label data");
        }
        ds.labels[i] = static_cast<int>(y);
    }
    return ds;
}

void save_idx(const LabeledDataset& ds, int img_rows, int img_cols,
              const std::string& images_path, const std::string& labels_path) {
    if (img_rows * img_cols != ds.d) {
        throw std::invalid_argument("save_idx: rows*cols must equal d");
    }
    std::ofstream img(images_path, std::ios::binary);
    if (!img) throw std::runtime_error("idx: cannot write " + images_path);
    std::ofstream lab(labels_path, std::ios::binary);
    if (!lab) throw std::runtime_error("idx: cannot write " + labels_path);
    write_be_u32(img, 2051);
    write_be_u32(img, static_cast<std::uint32_t>(ds.n));
    write_be_u32(img, static_cast<std::uint32_t>(img_rows));
    write_be_u32(img, static_cast<std::uint32_t>(img_cols));
    write_be_u32(lab, 2049);
    write_be_u32(lab, static_cast<std::uint32_t>(ds.n));
    std::vector<unsigned char> pixel_row(ds.d);
    for (int i = 0; i < ds.n; ++i) {
        const double* row = ds.inputs.row(i);
        for (int j = 0; j < ds.d; ++j) {
            const double scaled = std::clamp(row[j], 0.0, 1.0) * 255.0;
            pixel_row[j] = static_cast<unsigned char>(std::lround(scaled));
        }
        img.write(reinterpret_cast<const char*>(pixel_row.data()), ds.d);
        const unsigned char y = static_cast<unsigned char>(ds.labels[i]);
        lab.write(reinterpret_cast<const char*>(&y), 1);
    }
}

LabeledDataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file");
    // header x0,...,x{d-1},label
    int d = 0;
    {
        std::stringstream head(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(head, col, ',')) cols.push_back(col);
        if (cols.size() < 2 || cols.back() != "label") {
            throw std::runtime_error("csv: expected header x0,...,label");
        }
        d = static_cast<int>(cols.size()) - 1;
    }
    std::vector<double> values;
    std::vector<int> labels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        int col = 0;
        while (std::getline(row, cell, ',')) {
            if (col < d) {
                values.push_back(std::stod(cell));
            } else {
                labels.push_back(std::stoi(cell));
            }
            ++col;
        }
        if (col != d + 1) throw std::runtime_error("csv: ragged row");
    }
    LabeledDataset ds;
    ds.d = d;
    ds.n = static_cast<int>(labels.size());
    ds.provenance = Provenance::Csv;
    ds.inputs = Matrix(ds.n, d);
    std::copy(values.begin(), values.end(), ds.inputs.data.begin());
    ds.labels = std::move(labels);
    ds.num_classes = ds.labels.empty()
                         ? 2
                         : std::max(2, *std::max_element(ds.labels.begin(),
                                                         ds.labels.end()) + 1);
    return ds;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds,
                                                double train_fraction,
                                                std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("split: fraction must be in (0,1)");
    }
    Rng rng(derive_seed(seed, 0x73706c69ULL));
    const std::vector<std::size_t> order = rng.permutation(ds.n);
    const std::size_t n_train =
        static_cast<std::size_t>(train_fraction * ds.n + 0.5);
    auto take = [&](std::size_t lo, std::size_t hi) {
        LabeledDataset out;
        out.d = ds.d;
        out.n = static_cast<int>(hi - lo);
        out.num_classes = ds.num_classes;
        out.provenance = ds.provenance;
        out.params = ds.params;
        out.inputs = Matrix(out.n, ds.d);
        out.labels.resize(out.n);
        for (std::size_t i = lo; i < hi; ++i) {
            const double* src = ds.inputs.row(order[i]);
            std::copy(src, src + ds.d, out.inputs.row(i - lo));
            out.labels[i - lo] = ds.labels[order[i]];
        }
        return out;
    };
    return {take(0, n_train), take(n_train, order.size())};
}

Matrix sample_measure(const MeasureSpec& measure, int n, std::uint64_t seed) {
    switch (measure.kind) {
        case MeasureKind::SphereUniform:
            return gen_sphere_uniform(measure.d, n, seed);
        case MeasureKind::GaussianIsotropic: {
            Matrix m(n, measure.d);
            Rng rng(derive_seed(seed, 0x69736f31ULL));
            const double sigma = std::sqrt(measure.sigma2);
            for (double& v : m.data) v = sigma * rng.normal();
            return m;
        }
        case MeasureKind::GaussianMixture: {
            const int even = n % 2 == 0 ? n : n + 1;
            LabeledDataset ds = gen_gaussian_toy(measure.d, even,
                                                 std::sqrt(measure.sigma2),
                                                 measure.delta, seed);
            Matrix m(n, measure.d);
            std::copy(ds.inputs.data.begin(),
                      ds.inputs.data.begin() + std::size_t(n) * measure.d,
                      m.data.begin());
            return m;
        }
    }
    throw std::invalid_argument("sample_measure: unknown measure kind");
}

}  // namespace rlab
