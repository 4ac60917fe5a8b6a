#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace flowlab {

// Minimum pairwise infinity-norm separation below which an ensemble is
// rejected (never silently perturbed).
inline constexpr double kDistinctnessTol = 1e-9;

// N labeled points in R^d with pairwise-distinct positions.
class Ensemble {
   public:
    Ensemble(std::vector<double> row_major, int count, int dimension);

    static Ensemble from_rows(const std::vector<std::vector<double>>& rows);
    // Rejection-samples N distinct points uniform in [lo, hi]^d.
    static Ensemble random(std::uint64_t seed, int count, int dimension, double lo, double hi);
    // One point per row, comma separated.
    static Ensemble load_csv(const std::string& path);

    int size() const { return count_; }
    int dimension() const { return dimension_; }
    std::span<const double> point(int i) const {
        return {data_.data() + static_cast<std::size_t>(i) * dimension_,
                static_cast<std::size_t>(dimension_)};
    }
    const std::vector<double>& data() const { return data_; }

    double min_separation_inf() const;

    Ensemble permuted(std::span<const int> order) const;

   private:
    std::vector<double> data_;
    int count_ = 0;
    int dimension_ = 0;
};

}  // namespace flowlab
