#include "oee/csv.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace oee::csv {

std::string format(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error("not a number in CSV: '" + s + "'");
  return x;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

EdgeTag parse_tag(const std::string& s) {
  if (s == "bulk") return EdgeTag::Bulk;
  if (s == "real") return EdgeTag::Real;
  if (s == "virtual") return EdgeTag::Virtual;
  if (s == "none") return EdgeTag::None;
  throw Error("unknown edge tag '" + s + "'");
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error("CSV has no column '" + name + "'");
}

double Table::number(std::size_t row, const std::string& name) const {
  return parse_double(rows.at(row).at(column(name)));
}

void write(std::ostream& os, const Table& table) {
  const auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << fields[i];
    os << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
}

Table read(std::istream& is) {
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw Error("empty CSV");
  t.header = split(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != t.header.size()) throw Error("CSV row has " + std::to_string(fields.size()) + " fields");
    t.rows.push_back(std::move(fields));
  }
  return t;
}

Table texture_table(const SpinTexture& texture) {
  Table t{{"kx", "ky", "Sx", "Sy", "Sz", "|S|"}, {}};
  for (int i = 0; i < texture.grid.nx; ++i)
    for (int j = 0; j < texture.grid.ny; ++j) {
      const auto idx = texture.grid.index(i, j);
      const Vec3d& s = texture.vectors[idx];
      const double norm = texture.norms.empty() ? s.norm() : texture.norms[idx];
      t.rows.push_back({format(texture.grid.kx(i)), format(texture.grid.ky(j)), format(s(0)), format(s(1)),
                        format(s(2)), format(norm)});
    }
  return t;
}

Table realspace_texture_table(const RealSpaceTexture& texture) {
  Table t{{"x", "y", "Sx", "Sy", "Sz"}, {}};
  for (int x = 0; x < texture.nx; ++x)
    for (int y = 0; y < texture.ny; ++y) {
      const Vec3d& s = texture.at(x, y);
      t.rows.push_back({std::to_string(x), std::to_string(y), format(s(0)), format(s(1)), format(s(2))});
    }
  return t;
}

Table spectrum_table(const SpectrumSeries& series) {
  Table t{{"ky", "band_index", "energy"}, {}};
  for (const auto& pt : series.points)
    for (Eigen::Index n = 0; n < pt.values.size(); ++n)
      t.rows.push_back({format(pt.k), std::to_string(n), format(pt.values(n))});
  return t;
}

Table entanglement_table(const SpectrumSeries& series) {
  Table t{{"ky", "index", "xi", "degeneracy", "edge_tag"}, {}};
  for (const auto& pt : series.points)
    for (Eigen::Index n = 0; n < pt.values.size(); ++n) {
      const auto i = static_cast<std::size_t>(n);
      t.rows.push_back({format(pt.k), std::to_string(n), format(pt.values(n)),
                        std::to_string(pt.degeneracy.empty() ? 1 : pt.degeneracy[i]),
                        to_string(pt.edge_tag.empty() ? EdgeTag::None : pt.edge_tag[i])});
    }
  return t;
}

Table localization_table(const LocalizationProfile& profile) {
  Table t{{"layer", "probability"}, {}};
  for (std::size_t i = 0; i < profile.probability.size(); ++i)
    t.rows.push_back({std::to_string(profile.layer_index[i]), format(profile.probability[i])});
  return t;
}

Table phase_diagram_table(const PhaseDiagram& diagram) {
  Table t{{"mu", "delta0", "chern", "skyrmion", "min_spin_norm", "status"}, {}};
  for (const auto& p : diagram.points)
    t.rows.push_back({format(p.mu), format(p.delta0), std::to_string(p.chern), std::to_string(p.skyrmion),
                      format(p.min_spin_norm), p.status});
  return t;
}

SpectrumSeries read_spectrum(const Table& table) {
  const bool entanglement = std::find(table.header.begin(), table.header.end(), "xi") != table.header.end();
  const std::string value_col = entanglement ? "xi" : "energy";
  SpectrumSeries series;
  // Rows are grouped by ky in file order.
  std::vector<double> values;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double ky = table.number(r, "ky");
    if (series.points.empty() || series.points.back().k != ky) {
      if (!series.points.empty()) series.points.back().values = Eigen::Map<VecXd>(values.data(), static_cast<Eigen::Index>(values.size()));
      values.clear();
      series.points.emplace_back();
      series.points.back().k = ky;
    }
    values.push_back(table.number(r, value_col));
    if (entanglement) {
      auto& pt = series.points.back();
      pt.degeneracy.push_back(static_cast<int>(table.number(r, "degeneracy")));
      const EdgeTag tag = parse_tag(table.rows[r][table.column("edge_tag")]);
      if (tag != EdgeTag::None) pt.edge_tag.push_back(tag);
    }
  }
  if (!series.points.empty()) series.points.back().values = Eigen::Map<VecXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return series;
}

}  // namespace oee::csv
