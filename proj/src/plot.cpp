#include "pgs/plot.hpp"

#include <algorithm>
#include <sstream>

#include "pgs/ntps.hpp"
#include "pgs/version.hpp"

namespace pgs {

namespace {

struct Bounds {
    double min_x = 1e18, min_y = 1e18, max_x = -1e18, max_y = -1e18;

    void include(const Point2& p) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
};

class SvgWriter {
public:
    SvgWriter(const Bounds& bounds, double scale) : scale_(scale) {
        min_x_ = bounds.min_x - kMargin;
        max_y_ = bounds.max_y + kMargin;
        width_ = (bounds.max_x - bounds.min_x + 2 * kMargin) * scale;
        height_ = (bounds.max_y - bounds.min_y + 2 * kMargin) * scale;
    }

    // World y grows north; SVG y grows down.
    double tx(double x) const { return (x - min_x_) * scale_; }
    double ty(double y) const { return (max_y_ - y) * scale_; }

    void polyline(const std::vector<Point2>& pts, const std::string& style) {
        if (pts.size() < 2) return;
        body_ << "  <polyline fill=\"none\" " << style << " points=\"";
        for (const Point2& p : pts) body_ << tx(p.x) << "," << ty(p.y) << " ";
        body_ << "\"/>\n";
    }

    void polygon(const std::array<Point2, 4>& pts, const std::string& style) {
        body_ << "  <polygon " << style << " points=\"";
        for (const Point2& p : pts) body_ << tx(p.x) << "," << ty(p.y) << " ";
        body_ << "\"/>\n";
    }

    std::string finish(const std::string& comment) const {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
            << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n"
            << "  <!-- " << comment << " -->\n"
            << "  <rect width=\"100%\" height=\"100%\" fill=\"#fafafa\"/>\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

private:
    static constexpr double kMargin = 8.0;  // meters around the content
    double min_x_ = 0.0, max_y_ = 0.0, width_ = 0.0, height_ = 0.0;
    double scale_ = 6.0;
    std::ostringstream body_;
};

}  // namespace

std::string render_svg(const ScenarioSpec& scenario, const std::vector<StepTrace>* trace) {
    Bounds bounds;
    for (const Lane& lane : scenario.lanes) {
        for (const Point2& p : lane.centerline.points) bounds.include(p);
    }
    for (const Point2& p : scenario.ego.expert_trajectory.points) bounds.include(p);
    for (const AgentTrack& agent : scenario.agents) bounds.include(agent.initial_pose.position);
    if (trace != nullptr) {
        for (const StepTrace& row : *trace) bounds.include(row.ego.pose.position);
    }

    SvgWriter svg(bounds, 6.0);
    for (const Lane& lane : scenario.lanes) {
        svg.polyline(lane.centerline.points, "stroke=\"#b8b8b8\" stroke-width=\"1.5\"");
    }
    svg.polyline(scenario.ego.expert_trajectory.points,
                 "stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6,3\"");
    for (const AgentTrack& agent : scenario.agents) {
        svg.polyline(top_mode(agent).trajectory.points,
                     "stroke=\"#1f77b4\" stroke-width=\"1\" stroke-dasharray=\"3,3\"");
        const OrientedBox box{agent.initial_pose.position, 0.5 * agent.width, 0.5 * agent.length,
                              agent.initial_pose.heading};
        svg.polygon(box_corners(box),
                    "fill=\"#aec7e8\" stroke=\"#1f77b4\" stroke-width=\"1\"");
    }
    const OrientedBox ego_box{scenario.ego.pose.position, 0.5 * scenario.ego.width,
                              0.5 * scenario.ego.length, scenario.ego.pose.heading};
    svg.polygon(box_corners(ego_box), "fill=\"#98df8a\" stroke=\"#2ca02c\" stroke-width=\"1\"");
    if (trace != nullptr) {
        std::vector<Point2> executed;
        executed.reserve(trace->size());
        for (const StepTrace& row : *trace) executed.push_back(row.ego.pose.position);
        svg.polyline(executed, "stroke=\"#2ca02c\" stroke-width=\"2\"");
    }
    return svg.finish(std::string("pgs ") + kToolVersion);
}

}  // namespace pgs
