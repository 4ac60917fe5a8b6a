#include "flowlab/schedule.hpp"

namespace flowlab {

void to_json(nlohmann::json& j, const ControlSchedule& schedule) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : schedule.segments()) {
        segs.push_back({{"duration", s.duration}, {"params", s.params}});
    }
    j = nlohmann::json{{"segments", segs}};
}

ControlSchedule schedule_from_json(const nlohmann::json& j) {
    if (!j.contains("segments") || !j["segments"].is_array())
        throw std::invalid_argument("schedule json: missing 'segments' array");
    std::vector<Segment> segs;
    for (const auto& js : j["segments"]) {
        Segment s;
        s.duration = js.at("duration").get<double>();
        s.params = js.at("params").get<std::vector<double>>();
        segs.push_back(std::move(s));
    }
    return ControlSchedule(std::move(segs));
}

}  // namespace flowlab
