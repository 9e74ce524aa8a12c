#include "gpbench/report.hpp"

#include "gpbench/baselines.hpp"
#include "gpbench/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gpbench {

namespace {

constexpr double kWidth = 640;
constexpr double kLabelW = 190;
constexpr double kPlotL = 200;
constexpr double kPlotR = 620;
constexpr double kRowH = 18;
constexpr double kTitleH = 22;
constexpr double kAxisH = 28;
constexpr double kPanelGap = 14;

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string px(double v) { return format_fixed(v, 2); }

struct Row {
    std::string label;
    double mlae;
    double low;
    double high;
    bool human;
};

void panel(std::ostringstream& svg, TaskId task, const std::vector<Row>& rows, double top) {
    double lo = -3.0, hi = -3.0;
    for (const auto& r : rows) {
        lo = std::min({lo, r.low, r.mlae});
        hi = std::max({hi, r.high, r.mlae});
    }
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi - lo < 1) hi = lo + 1;
    const double step = std::max(1.0, std::ceil((hi - lo) / 10.0));
    hi = lo + step * std::ceil((hi - lo) / step);
    auto x = [&](double v) { return kPlotL + (v - lo) / (hi - lo) * (kPlotR - kPlotL); };

    const double body = kRowH * static_cast<double>(rows.size());
    svg << "<g class=\"panel\" data-task=\"" << task_name(task) << "\">\n";
    svg << "<text x=\"10\" y=\"" << px(top + 15) << "\" font-weight=\"bold\">" << task_name(task) << "</text>\n";
    const double rows_top = top + kTitleH;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        const double y0 = rows_top + kRowH * static_cast<double>(i);
        const double cy = y0 + kRowH / 2;
        svg << "<g class=\"" << (r.human ? "human" : "model") << "\" data-mlae=\"" << format_fixed(r.mlae, 3)
            << "\" data-low=\"" << format_fixed(r.low, 3) << "\" data-high=\"" << format_fixed(r.high, 3) << "\">";
        if (r.human)
            svg << "<rect x=\"0\" y=\"" << px(y0) << "\" width=\"" << px(kWidth) << "\" height=\"" << px(kRowH)
                << "\" fill=\"#e6e6e6\"/>";
        svg << "<text x=\"" << px(kLabelW) << "\" y=\"" << px(cy + 4) << "\" text-anchor=\"end\">"
            << xml_escape(r.label) << "</text>";
        svg << "<line x1=\"" << px(x(r.low)) << "\" y1=\"" << px(cy) << "\" x2=\"" << px(x(r.high)) << "\" y2=\""
            << px(cy) << "\" stroke=\"#333\" stroke-width=\"2\"/>";
        svg << "<circle cx=\"" << px(x(r.mlae)) << "\" cy=\"" << px(cy) << "\" r=\"4\" fill=\""
            << (r.human ? "#888" : "#1f77b4") << "\"/>";
        svg << "</g>\n";
    }
    const double axis_y = rows_top + body + 4;
    svg << "<line x1=\"" << px(kPlotL) << "\" y1=\"" << px(axis_y) << "\" x2=\"" << px(kPlotR) << "\" y2=\""
        << px(axis_y) << "\" stroke=\"#000\"/>\n";
    for (double t = lo; t <= hi + 1e-9; t += step) {
        svg << "<line x1=\"" << px(x(t)) << "\" y1=\"" << px(axis_y) << "\" x2=\"" << px(x(t)) << "\" y2=\""
            << px(axis_y + 4) << "\" stroke=\"#000\"/>";
        svg << "<text x=\"" << px(x(t)) << "\" y=\"" << px(axis_y + 16) << "\" text-anchor=\"middle\">"
            << format_number(t) << "</text>\n";
    }
    svg << "</g>\n";
}

}  // namespace

std::string render_experiment_svg(Experiment e, const std::vector<MetricSummary>& summaries) {
    std::vector<std::pair<TaskId, std::vector<Row>>> panels;
    for (TaskId t : tasks_of(e)) {
        std::vector<Row> rows;
        for (const auto& s : summaries)
            if (s.task == t) rows.push_back({s.model_id, s.mlae, s.ci_low, s.ci_high, false});
        if (rows.empty()) continue;
        for (const auto& b : baselines_for(t))
            rows.push_back({"Human (" + std::string(b.source) + ")", b.mlae, b.mlae - b.sd, b.mlae + b.sd, true});
        panels.emplace_back(t, std::move(rows));
    }

    double height = 40;
    for (const auto& [t, rows] : panels)
        height += kTitleH + kRowH * static_cast<double>(rows.size()) + kAxisH + kPanelGap;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(kWidth) << "\" height=\"" << px(height)
        << "\" viewBox=\"0 0 " << px(kWidth) << " " << px(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    svg << "<text x=\"10\" y=\"22\" font-size=\"14\">" << experiment_name(e)
        << ": MLAE with 95% bootstrap CI (lower is better)</text>\n";
    double top = 40;
    for (const auto& [t, rows] : panels) {
        panel(svg, t, rows, top);
        top += kTitleH + kRowH * static_cast<double>(rows.size()) + kAxisH + kPanelGap;
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string render_markdown(const std::vector<MetricSummary>& summaries) {
    std::ostringstream md;
    md << "# MLAE summary\n\n";
    md << "| task | model | n | MLAE | SD | 95% CI | MAE | MSE |\n";
    md << "|---|---|---:|---:|---:|---|---:|---:|\n";
    for (const auto& s : summaries)
        md << "| " << task_name(s.task) << " | " << s.model_id << " | " << s.n << " | " << format_fixed(s.mlae, 3)
           << " | " << format_fixed(s.mlae_sd, 3) << " | [" << format_fixed(s.ci_low, 3) << ", "
           << format_fixed(s.ci_high, 3) << "] | " << format_fixed(s.mae, 3) << " | " << format_fixed(s.mse, 3)
           << " |\n";
    md << "\n## Human baselines\n\n| task | source | MLAE | SD |\n|---|---|---:|---:|\n";
    for (const auto& b : human_baselines()) {
        const bool used = std::any_of(summaries.begin(), summaries.end(), [&](const auto& s) { return s.task == b.task; });
        if (used)
            md << "| " << task_name(b.task) << " | " << b.source << " | " << format_number(b.mlae) << " | "
               << format_number(b.sd) << " |\n";
    }
    return md.str();
}

}  // namespace gpbench
