#include "vbc/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace vbc {

namespace {
const char* cluster_color(int c) {
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette[c % 10];
}
} // namespace

void write_trace_svg(std::ostream& out, const EvolutionTrace& trace, int k,
                     const std::string& title) {
    const int width = 900, height = 260;
    const int margin_l = 60, margin_r = 20, margin_t = 40, margin_b = 40;
    const double plot_w = width - margin_l - margin_r;
    const double plot_h = height - margin_t - margin_b;

    double t_max = 1.0;
    for (const TraceStep& s : trace.steps) t_max = std::max(t_max, s.relative_time);

    auto xpos = [&](double t) { return margin_l + plot_w * (t / t_max); };
    auto ypos = [&](int cluster) {
        return margin_t + plot_h * (1.0 - (cluster + 0.5) / std::max(1, k));
    };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << margin_l << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
        << title << "</text>\n";

    for (int c = 0; c < k; ++c) {
        const double y = ypos(c);
        out << "<line x1=\"" << margin_l << "\" y1=\"" << y << "\" x2=\"" << (width - margin_r)
            << "\" y2=\"" << y << "\" stroke=\"#eeeeee\"/>\n";
        out << "<text x=\"8\" y=\"" << y + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">c" << c << "</text>\n";
    }

    char buf[128];
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const TraceStep& s = trace.steps[i];
        const double x0 = xpos(s.relative_time);
        const double x1 = (i + 1 < trace.steps.size()) ? xpos(trace.steps[i + 1].relative_time)
                                                       : static_cast<double>(width - margin_r);
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" "
                      "stroke-width=\"6\"/>\n",
                      x0, ypos(s.cluster), x1, ypos(s.cluster), cluster_color(s.cluster));
        out << buf;
    }

    out << "<text x=\"" << margin_l << "\" y=\"" << height - 12
        << "\" font-family=\"sans-serif\" font-size=\"12\">relative time (s), 0 .. "
        << static_cast<long>(t_max) << "</text>\n";
    out << "</svg>\n";
}

} // namespace vbc
