#pragma once

#include <json.hpp>

#include <stdexcept>
#include <vector>

namespace flowlab {

// One piecewise-constant control segment: hold `params` for `duration`.
struct Segment {
    double duration = 0.0;
    std::vector<double> params;
};

class ControlSchedule {
   public:
    explicit ControlSchedule(std::vector<Segment> segments) : segments_(std::move(segments)) {
        if (segments_.empty()) throw std::invalid_argument("schedule needs >= 1 segment");
        for (const auto& s : segments_) {
            if (!(s.duration > 0.0))
                throw std::invalid_argument("schedule durations must be positive");
        }
    }

    static ControlSchedule single(double duration, std::vector<double> params) {
        return ControlSchedule({Segment{duration, std::move(params)}});
    }

    // Equal-duration segments from a flat parameter matrix (k rows).
    static ControlSchedule uniform(double segment_duration, int num_segments,
                                   const std::vector<double>& flat_params) {
        if (num_segments < 1) throw std::invalid_argument("num_segments must be >= 1");
        if (flat_params.size() % num_segments != 0)
            throw std::invalid_argument("parameter count not divisible by segment count");
        const std::size_t per = flat_params.size() / num_segments;
        std::vector<Segment> segs(num_segments);
        for (int s = 0; s < num_segments; ++s) {
            segs[s].duration = segment_duration;
            segs[s].params.assign(flat_params.begin() + s * per,
                                  flat_params.begin() + (s + 1) * per);
        }
        return ControlSchedule(std::move(segs));
    }

    const std::vector<Segment>& segments() const { return segments_; }
    int segment_count() const { return static_cast<int>(segments_.size()); }

    double total_time() const {
        double t = 0.0;
        for (const auto& s : segments_) t += s.duration;
        return t;
    }

    ControlSchedule then(const ControlSchedule& next) const {
        std::vector<Segment> segs = segments_;
        segs.insert(segs.end(), next.segments_.begin(), next.segments_.end());
        return ControlSchedule(std::move(segs));
    }

    // Time-reversal with negated parameters; inverts the flow of an affine
    // family.
    ControlSchedule reversed_negated() const {
        std::vector<Segment> segs(segments_.rbegin(), segments_.rend());
        for (auto& s : segs) {
            for (auto& p : s.params) p = -p;
        }
        return ControlSchedule(std::move(segs));
    }

   private:
    std::vector<Segment> segments_;
};

void to_json(nlohmann::json& j, const ControlSchedule& schedule);
ControlSchedule schedule_from_json(const nlohmann::json& j);

}  // namespace flowlab
