#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nestcal/error.hpp"
#include "nestcal/harness.hpp"

namespace nestcal {

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

}  // namespace

std::string to_csv(const ExperimentResult& result, bool include_timing) {
  std::ostringstream out;
  out << "axis_value,method,mse_gain,mse_phase_rad2,doa_rmse_deg";
  if (include_timing) out << ",mean_solve_ms";
  out << ",failures\n";
  for (const auto& point : result.records) {
    for (const auto& m : point.methods) {
      out << number(point.axis_value) << ',' << m.method << ',' << number(m.mse_gain) << ','
          << number(m.mse_phase_rad2) << ',';
      if (m.doa_rmse_deg) out << number(*m.doa_rmse_deg);
      if (include_timing) out << ',' << number(m.mean_solve_ms);
      out << ',' << m.failures << '\n';
    }
  }
  return out.str();
}

namespace {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

constexpr double panel_w = 640, panel_h = 260, margin_l = 80, margin_r = 130, margin_t = 30,
                 margin_b = 45;

const char* colour(std::size_t k) {
  static constexpr std::array<const char*, 4> palette = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd"};
  return palette[k % palette.size()];
}

// One log-y panel at vertical offset y0.
void draw_panel(std::ostringstream& svg, double y0, const std::string& title,
                const std::string& x_label, bool log_x, const std::vector<Series>& series) {
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!(s.y[k] > 0.0) || !std::isfinite(s.y[k])) continue;
      xmin = std::min(xmin, tx(s.x[k]));
      xmax = std::max(xmax, tx(s.x[k]));
      ymin = std::min(ymin, std::log10(s.y[k]));
      ymax = std::max(ymax, std::log10(s.y[k]));
    }
  }
  if (!std::isfinite(xmin)) return;
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax <= ymin) ymax = ymin + 1;
  if (xmax <= xmin) xmax = xmin + 1;
  const double w = panel_w - margin_l - margin_r;
  const double h = panel_h - margin_t - margin_b;
  auto px = [&](double v) { return margin_l + (tx(v) - xmin) / (xmax - xmin) * w; };
  auto py = [&](double v) { return y0 + margin_t + (ymax - std::log10(v)) / (ymax - ymin) * h; };

  svg << "<text x=\"" << panel_w / 2 << "\" y=\"" << y0 + 18
      << "\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  svg << "<rect x=\"" << margin_l << "\" y=\"" << y0 + margin_t << "\" width=\"" << w
      << "\" height=\"" << h << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); ++e) {
    const double y = py(std::pow(10.0, e));
    svg << "<line x1=\"" << margin_l << "\" x2=\"" << margin_l + w << "\" y1=\"" << y << "\" y2=\""
        << y << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << margin_l - 6 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"11\">1e" << e << "</text>\n";
  }
  for (double xv : series.front().x) {
    svg << "<text x=\"" << px(xv) << "\" y=\"" << y0 + margin_t + h + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">" << number(xv) << "</text>\n";
  }
  svg << "<text x=\"" << margin_l + w / 2 << "\" y=\"" << y0 + panel_h - 6
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    svg << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << colour(k) << "\" points=\"";
    for (std::size_t p = 0; p < s.x.size(); ++p) {
      if (s.y[p] > 0.0 && std::isfinite(s.y[p])) svg << fixed(px(s.x[p])) << ',' << fixed(py(s.y[p])) << ' ';
    }
    svg << "\"/>\n";
    for (std::size_t p = 0; p < s.x.size(); ++p) {
      if (!(s.y[p] > 0.0) || !std::isfinite(s.y[p])) continue;
      svg << "<circle r=\"3\" fill=\"" << colour(k) << "\" cx=\"" << fixed(px(s.x[p]))
          << "\" cy=\"" << fixed(py(s.y[p])) << "\"/>\n";
    }
    const double ly = y0 + margin_t + 14 + 18 * static_cast<double>(k);
    svg << "<line x1=\"" << margin_l + w + 10 << "\" x2=\"" << margin_l + w + 30 << "\" y1=\"" << ly
        << "\" y2=\"" << ly << "\" stroke-width=\"2\" stroke=\"" << colour(k) << "\"/>\n";
    svg << "<text x=\"" << margin_l + w + 35 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
        << s.name << "</text>\n";
  }
}

}  // namespace

std::string to_svg(const ExperimentResult& result, const std::string& title) {
  if (result.records.empty()) throw Error(ErrorKind::InvalidArgument, "empty result");
  const bool log_x = result.axis == SweepAxis::SampleCount;
  const std::string x_label = log_x ? "T (snapshots)" : "SNR [dB]";

  std::vector<std::string> names;
  for (const auto& m : result.records.front().methods) names.push_back(m.method);
  auto collect = [&](auto field, bool skip_uncalibrated) {
    std::vector<Series> out;
    for (const auto& name : names) {
      if (skip_uncalibrated && name == "uncalibrated") continue;
      Series s{name, {}, {}};
      for (const auto& point : result.records) {
        s.x.push_back(point.axis_value);
        s.y.push_back(field(point.method(name)));
      }
      out.push_back(std::move(s));
    }
    return out;
  };
  const bool has_doa = result.records.front().methods.front().doa_rmse_deg.has_value();
  const int panels = has_doa ? 3 : 2;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << panel_w << "\" height=\""
      << panel_h * panels + 30 << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << panel_w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";
  draw_panel(svg, 30, "MSE of gain estimates", x_label, log_x,
             collect([](const MethodRecord& m) { return m.mse_gain; }, true));
  draw_panel(svg, 30 + panel_h, "MSE of phase estimates [rad^2]", x_label, log_x,
             collect([](const MethodRecord& m) { return m.mse_phase_rad2; }, true));
  if (has_doa) {
    draw_panel(svg, 30 + 2 * panel_h, "DOA RMSE [deg]", x_label, log_x,
               collect([](const MethodRecord& m) { return m.doa_rmse_deg.value_or(NAN); }, false));
  }
  svg << "</svg>\n";
  return svg.str();
}

std::filesystem::path emit_results(const ExperimentResult& result, OutputFormat format,
                                   const std::filesystem::path& dir, const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  const auto path = dir / (stem + (format == OutputFormat::Csv ? ".csv" : ".svg"));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << (format == OutputFormat::Csv ? to_csv(result) : to_svg(result, stem));
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
  return path;
}

}  // namespace nestcal
