#include "flowlab/ensemble.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "flowlab/rng.hpp"

namespace flowlab {

Ensemble::Ensemble(std::vector<double> row_major, int count, int dimension)
    : data_(std::move(row_major)), count_(count), dimension_(dimension) {
    if (count < 1 || dimension < 1) throw std::invalid_argument("ensemble: bad shape");
    if (data_.size() != static_cast<std::size_t>(count) * dimension)
        throw std::invalid_argument("ensemble: data size does not match shape");
    for (double v : data_) {
        if (!std::isfinite(v)) throw std::invalid_argument("ensemble: non-finite coordinate");
    }
    if (min_separation_inf() <= kDistinctnessTol)
        throw std::invalid_argument("ensemble: points are not pairwise distinct at tolerance " +
                                    std::to_string(kDistinctnessTol));
}

Ensemble Ensemble::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("ensemble: no rows");
    const int d = static_cast<int>(rows.front().size());
    std::vector<double> flat;
    flat.reserve(rows.size() * d);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != d)
            throw std::invalid_argument("ensemble: ragged rows");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return Ensemble(std::move(flat), static_cast<int>(rows.size()), d);
}

Ensemble Ensemble::random(std::uint64_t seed, int count, int dimension, double lo, double hi) {
    if (count < 1 || dimension < 1) throw std::invalid_argument("ensemble: bad shape");
    Rng rng(seed);
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(count) * dimension);
    int placed = 0;
    int attempts = 0;
    while (placed < count) {
        if (++attempts > 1000 * count)
            throw std::runtime_error("ensemble: failed to draw distinct points");
        std::vector<double> candidate(dimension);
        for (int j = 0; j < dimension; ++j) candidate[j] = rng.uniform(lo, hi);
        bool ok = true;
        for (int i = 0; i < placed && ok; ++i) {
            double sep = 0.0;
            for (int j = 0; j < dimension; ++j)
                sep = std::max(sep, std::abs(candidate[j] - flat[i * dimension + j]));
            ok = sep > 10 * kDistinctnessTol;
        }
        if (!ok) continue;
        flat.insert(flat.end(), candidate.begin(), candidate.end());
        ++placed;
    }
    return Ensemble(std::move(flat), count, dimension);
}

Ensemble Ensemble::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ensemble file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return from_rows(rows);
}

double Ensemble::min_separation_inf() const {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < count_; ++i) {
        for (int j = i + 1; j < count_; ++j) {
            double sep = 0.0;
            for (int k = 0; k < dimension_; ++k)
                sep = std::max(sep, std::abs(data_[i * dimension_ + k] - data_[j * dimension_ + k]));
            best = std::min(best, sep);
        }
    }
    return best;
}

Ensemble Ensemble::permuted(std::span<const int> order) const {
    if (static_cast<int>(order.size()) != count_)
        throw std::invalid_argument("permuted: order length mismatch");
    std::vector<double> flat(data_.size());
    for (int i = 0; i < count_; ++i) {
        const auto src = point(order[i]);
        std::copy(src.begin(), src.end(), flat.begin() + static_cast<std::size_t>(i) * dimension_);
    }
    return Ensemble(std::move(flat), count_, dimension_);
}

}  // namespace flowlab
