#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hvf {

struct ResultRow {
  std::string method;      // no_subgoal | hvf | gt_bottleneck
  std::string difficulty;  // easy | medium | hard
  int k = 0;
  std::string mode;  // max | mean
  int samples = 0;   // execution-time CEM population
  int horizon = 0;
  double success_rate = 0.0;
  double mean_steps = 0.0;
  double wall_clock_s = 0.0;
  // carried for the summary, not part of the CSV
  int successes = 0;
  int trials = 0;
  bool complete = true;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

inline constexpr const char* kResultsHeader =
    "method,difficulty,k,mode,samples,horizon,success_rate,mean_steps,wall_clock_s";

namespace detail {
inline std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}
}  // namespace detail

inline std::string to_csv(const ResultTable& t) {
  std::string out = kResultsHeader;
  out += '\n';
  for (const ResultRow& r : t.rows) {
    out += r.method + ',' + r.difficulty + ',' + std::to_string(r.k) + ',' + r.mode +
           ',' + std::to_string(r.samples) + ',' + std::to_string(r.horizon) + ',' +
           detail::fixed4(r.success_rate) + ',' + detail::fixed4(r.mean_steps) + ',' +
           detail::fixed4(r.wall_clock_s) + '\n';
  }
  return out;
}

inline ResultTable parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    throw std::invalid_argument("results csv: bad header");
  ResultTable t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> f;
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (f.size() != 9) throw std::invalid_argument("results csv: bad row: " + line);
    ResultRow r;
    r.method = f[0];
    r.difficulty = f[1];
    r.k = std::stoi(f[2]);
    r.mode = f[3];
    r.samples = std::stoi(f[4]);
    r.horizon = std::stoi(f[5]);
    r.success_rate = std::stod(f[6]);
    r.mean_steps = std::stod(f[7]);
    r.wall_clock_s = std::stod(f[8]);
    t.rows.push_back(std::move(r));
  }
  return t;
}

// 95% Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(int successes, int trials) {
  if (trials <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double n = trials, p = double(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  // at the degenerate proportions the exact bound is the endpoint itself;
  // computing it in floats can miss by an ulp and break containment
  const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

// Success rates reported for the full-scale benchmark this harness mirrors
// (hard difficulty, worst-leg objective unless stated). Used as a side-by-side
// column in the summary; blank for cells without a published counterpart.
inline std::optional<double> reference_success(const ResultRow& r) {
  if (r.difficulty != "hard") return std::nullopt;
  if (r.mode == "mean" && r.samples == 200 && r.horizon == 5) {
    if (r.k == 1) return 0.45;
    if (r.k == 2) return 0.53;
    return std::nullopt;
  }
  if (r.mode != "max") return std::nullopt;
  if (r.samples == 200 && r.horizon == 5) {
    switch (r.k) {
      case 0: return 0.33;
      case 1: return 0.47;
      case 2: return 0.54;
      case 3: return 0.39;
      case 5: return 0.02;
      case 10: return 0.00;
    }
    return std::nullopt;
  }
  if (r.samples == 1000 && r.horizon == 5) {
    if (r.k == 0) return 0.35;
    if (r.k == 1) return 0.54;
    if (r.k == 2) return 0.55;
    return std::nullopt;
  }
  if (r.samples == 200 && r.horizon == 10) {
    if (r.k == 0) return 0.46;
    if (r.k == 1) return 0.55;
    if (r.k == 2) return 0.37;
    return std::nullopt;
  }
  if (r.samples == 200 && r.horizon == 15) {
    if (r.k == 0) return 0.31;
    if (r.k == 1) return 0.39;
    if (r.k == 2) return 0.24;
  }
  return std::nullopt;
}

inline std::string to_markdown_summary(const ResultTable& t, const std::string& title) {
  std::string md = "# " + title + "\n\n";
  md += "| method | difficulty | k | mode | samples | horizon | success | 95% CI | "
        "reference | mean steps | wall clock (s) |\n";
  md += "|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const ResultRow& r : t.rows) {
    const auto [lo, hi] = wilson_interval(r.successes, r.trials);
    const auto ref = reference_success(r);
    md += "| " + r.method + " | " + r.difficulty + " | " + std::to_string(r.k) + " | " +
          r.mode + " | " + std::to_string(r.samples) + " | " + std::to_string(r.horizon) +
          " | " + detail::fixed4(r.success_rate) + " | [" + detail::fixed4(lo) + ", " +
          detail::fixed4(hi) + "] | " + (ref ? detail::fixed4(*ref) : std::string("-")) +
          " | " + detail::fixed4(r.mean_steps) + " | " + detail::fixed4(r.wall_clock_s) +
          " |" + (r.complete ? "" : " (incomplete)") + "\n";
  }
  md += "\nwall clock is a deterministic compute proxy: predicted model states times a "
        "fixed per-state cost. Success CIs are Wilson 95% intervals.\n";
  return md;
}

// Minimal grouped bar chart; pure text output keeps reruns byte-identical.
inline std::string to_svg_bars(const ResultTable& t, const std::string& title,
                               const std::function<std::string(const ResultRow&)>& label = {}) {
  const int w = 720, h = 400, mt = 48, mb = 72, ml = 56, mr = 16;
  const int plot_w = w - ml - mr, plot_h = h - mt - mb;
  const int n = int(t.rows.size());
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  svg << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << w / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"16\">" << title << "</text>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = tick / 4.0;
    const int y = mt + int(std::lround((1.0 - v) * plot_h));
    svg << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << w - mr << "\" y2=\"" << y
        << "\" stroke=\"#cccccc\"/>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">"
        << detail::fixed4(v).substr(0, 4) << "</text>\n";
  }
  if (n > 0) {
    const double slot = double(plot_w) / n;
    for (int i = 0; i < n; ++i) {
      const ResultRow& r = t.rows[i];
      const double bw = slot * 0.6;
      const double x = ml + slot * i + slot * 0.2;
      const int bh = int(std::lround(std::clamp(r.success_rate, 0.0, 1.0) * plot_h));
      svg << "<rect x=\"" << int(x) << "\" y=\"" << mt + plot_h - bh << "\" width=\""
          << int(bw) << "\" height=\"" << bh << "\" fill=\"#4477aa\"/>\n";
      const std::string lab =
          label ? label(r) : r.method + " k=" + std::to_string(r.k);
      svg << "<text x=\"" << int(x + bw / 2) << "\" y=\"" << mt + plot_h + 16
          << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"10\">" << lab
          << "</text>\n";
      svg << "<text x=\"" << int(x + bw / 2) << "\" y=\"" << mt + plot_h - bh - 4
          << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"10\">"
          << detail::fixed4(r.success_rate) << "</text>\n";
    }
  }
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << mt + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\"" << w - mr
      << "\" y2=\"" << mt + plot_h << "\" stroke=\"black\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(content.data(), std::streamsize(content.size()));
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hvf
