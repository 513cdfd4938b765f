#include "ramified/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace ramified {

namespace {

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

}  // namespace

std::string render_svg(const FlowField& flow, double alpha) {
    require_alpha(alpha);
    const EmbeddedNetwork& net = flow.network();
    if (net.dim() != 2) fail(Errc::DimensionMismatch, "SVG export is 2-D only");

    double min_x = 0.0, min_y = 0.0, max_x = 1.0, max_y = 1.0;
    if (net.vertex_count() > 0) {
        min_x = max_x = net.vertex(0)[0];
        min_y = max_y = net.vertex(0)[1];
        for (int i = 1; i < net.vertex_count(); ++i) {
            min_x = std::min(min_x, net.vertex(i)[0]);
            max_x = std::max(max_x, net.vertex(i)[0]);
            min_y = std::min(min_y, net.vertex(i)[1]);
            max_y = std::max(max_y, net.vertex(i)[1]);
        }
    }
    const double span = std::max({max_x - min_x, max_y - min_y, 1e-9});
    const double margin = 0.08 * span;
    const double scale = 720.0 / (span + 2 * margin);
    auto sx = [&](double x) { return (x - min_x + margin) * scale; };
    auto sy = [&](double y) { return (max_y - y + margin) * scale; };  // flip y

    double max_walpha = 0.0;
    for (int e = 0; e < net.edge_count(); ++e)
        max_walpha = std::max(max_walpha, alpha_pow(flow.weight(e), alpha));
    const double stroke_scale = max_walpha > 0.0 ? 9.0 / max_walpha : 1.0;

    const double width = (max_x - min_x + 2 * margin) * scale;
    const double height = (max_y - min_y + 2 * margin) * scale;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
           num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int e = 0; e < net.edge_count(); ++e) {
        if (!(flow.weight(e) > 0.0)) continue;
        const Point& a = net.vertex(net.edge(e).tail);
        const Point& b = net.vertex(net.edge(e).head);
        svg += "<line x1=\"" + num(sx(a[0])) + "\" y1=\"" + num(sy(a[1])) + "\" x2=\"" +
               num(sx(b[0])) + "\" y2=\"" + num(sy(b[1])) + "\" stroke=\"#1f2937\" stroke-width=\"" +
               num(stroke_scale * alpha_pow(flow.weight(e), alpha)) +
               "\" stroke-linecap=\"round\"/>\n";
    }
    const SignedAtomic div = divergence(flow);
    for (const Atom& a : div.positive().atoms())
        svg += "<circle cx=\"" + num(sx(a.p[0])) + "\" cy=\"" + num(sy(a.p[1])) +
               "\" r=\"5\" fill=\"#15803d\"/>\n";
    for (const Atom& a : div.negative().atoms())
        svg += "<circle cx=\"" + num(sx(a.p[0])) + "\" cy=\"" + num(sy(a.p[1])) +
               "\" r=\"5\" fill=\"#b91c1c\"/>\n";
    for (int i = 0; i < net.vertex_count(); ++i)
        svg += "<circle cx=\"" + num(sx(net.vertex(i)[0])) + "\" cy=\"" + num(sy(net.vertex(i)[1])) +
               "\" r=\"2\" fill=\"#475569\"/>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace ramified
