#include "flowlab/domain.hpp"

#include <cmath>
#include <numbers>

#include "flowlab/rng.hpp"

namespace flowlab {

DomainSpec DomainSpec::box(std::vector<double> lo, std::vector<double> hi,
                           std::vector<int> resolution) {
    if (lo.empty() || lo.size() != hi.size()) throw std::invalid_argument("box: bad bounds");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < hi[i])) throw std::invalid_argument("box: needs positive measure");
    }
    if (resolution.empty()) resolution.assign(lo.size(), kDefaultBoxResolution);
    if (resolution.size() != lo.size())
        throw std::invalid_argument("box: resolution arity mismatch");
    for (int r : resolution) {
        if (r < 2) throw std::invalid_argument("box: grid resolution must be >= 2 per axis");
    }
    DomainSpec d;
    d.kind_ = Kind::Box;
    d.dimension_ = static_cast<int>(lo.size());
    d.lo_ = std::move(lo);
    d.hi_ = std::move(hi);
    d.resolution_ = std::move(resolution);
    return d;
}

DomainSpec DomainSpec::disc(std::vector<double> center, double radius, int radial, int angular) {
    if (center.size() != 2) throw std::invalid_argument("disc: center must be in R^2");
    if (!(radius > 0.0)) throw std::invalid_argument("disc: needs positive radius");
    if (radial < 2 || angular < 2) throw std::invalid_argument("disc: resolution must be >= 2");
    DomainSpec d;
    d.kind_ = Kind::Disc;
    d.dimension_ = 2;
    d.center_ = std::move(center);
    d.radius_ = radius;
    d.radial_ = radial;
    d.angular_ = angular;
    return d;
}

DomainSpec& DomainSpec::with_monte_carlo(int num_points, std::uint64_t seed) {
    if (num_points < 1) throw std::invalid_argument("monte carlo: needs >= 1 point");
    rule_ = Rule::MonteCarlo;
    mc_points_ = num_points;
    mc_seed_ = seed;
    return *this;
}

double DomainSpec::measure() const {
    if (kind_ == Kind::Box) {
        double m = 1.0;
        for (std::size_t i = 0; i < lo_.size(); ++i) m *= hi_[i] - lo_[i];
        return m;
    }
    return std::numbers::pi * radius_ * radius_;
}

Quadrature DomainSpec::quadrature() const {
    Quadrature q;
    q.dimension = dimension_;
    q.measure = measure();

    if (rule_ == Rule::MonteCarlo) {
        Rng rng(mc_seed_);
        q.count = mc_points_;
        q.nodes.reserve(static_cast<std::size_t>(mc_points_) * dimension_);
        const double w = q.measure / mc_points_;
        for (int i = 0; i < mc_points_; ++i) {
            if (kind_ == Kind::Box) {
                for (int a = 0; a < dimension_; ++a) q.nodes.push_back(rng.uniform(lo_[a], hi_[a]));
            } else {
                const double r = radius_ * std::sqrt(rng.uniform(0.0, 1.0));
                const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
                q.nodes.push_back(center_[0] + r * std::cos(phi));
                q.nodes.push_back(center_[1] + r * std::sin(phi));
            }
            q.weights.push_back(w);
        }
        return q;
    }

    if (kind_ == Kind::Box) {
        // Midpoint tensor grid: resolution_[a] cells per axis.
        std::vector<double> width(dimension_);
        double cell = 1.0;
        long total = 1;
        for (int a = 0; a < dimension_; ++a) {
            width[a] = (hi_[a] - lo_[a]) / resolution_[a];
            cell *= width[a];
            total *= resolution_[a];
        }
        q.count = static_cast<int>(total);
        q.nodes.reserve(total * dimension_);
        q.weights.assign(total, cell);
        std::vector<int> idx(dimension_, 0);
        for (long n = 0; n < total; ++n) {
            for (int a = 0; a < dimension_; ++a)
                q.nodes.push_back(lo_[a] + (idx[a] + 0.5) * width[a]);
            for (int a = dimension_ - 1; a >= 0; --a) {
                if (++idx[a] < resolution_[a]) break;
                idx[a] = 0;
            }
        }
        return q;
    }

    // Polar midpoint grid with the radial weight r dr dphi.
    const double dr = radius_ / radial_;
    const double dphi = 2.0 * std::numbers::pi / angular_;
    q.count = radial_ * angular_;
    q.nodes.reserve(static_cast<std::size_t>(q.count) * 2);
    q.weights.reserve(q.count);
    for (int i = 0; i < radial_; ++i) {
        const double r = (i + 0.5) * dr;
        for (int j = 0; j < angular_; ++j) {
            const double phi = (j + 0.5) * dphi;
            q.nodes.push_back(center_[0] + r * std::cos(phi));
            q.nodes.push_back(center_[1] + r * std::sin(phi));
            q.weights.push_back(r * dr * dphi);
        }
    }
    return q;
}

}  // namespace flowlab
