#include "tpca/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace tpca {

namespace {

constexpr char kMagic[8] = {'T', 'P', 'C', 'A', 'T', 'N', 'S', 'R'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

void put_f64(std::ostream& out, double v) {
  uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = uint8_t(u >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= uint64_t(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

void write_header(std::ostream& out, uint32_t k, uint32_t n) {
  out.write(kMagic, 8);
  put_u32(out, kVersion);
  put_u32(out, 0);
  put_u32(out, k);
  put_u32(out, n);
}

std::pair<uint32_t, uint32_t> read_header(std::istream& in, const std::string& path) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("bad magic in " + path);
  uint32_t version = get_u32(in);
  if (version != kVersion) throw std::runtime_error("unsupported version in " + path);
  get_u32(in);  // reserved
  uint32_t k = get_u32(in);
  uint32_t n = get_u32(in);
  return {k, n};
}

}  // namespace

void write_tensor(const std::string& path, const DenseTensor& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_header(out, uint32_t(t.order), uint32_t(t.dim));
  for (double e : t.entries) put_f64(out, e);
}

DenseTensor read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  auto [k, n] = read_header(in, path);
  DenseTensor t(int(k), int(n));
  for (double& e : t.entries) e = get_f64(in);
  if (!in) throw std::runtime_error("truncated tensor file " + path);
  return t;
}

void write_matrix(const std::string& path, const MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("write_matrix: square matrices only");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_header(out, 2, uint32_t(m.rows()));
  for (int64_t r = 0; r < m.rows(); ++r)
    for (int64_t c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
}

MatrixXd read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  auto [k, n] = read_header(in, path);
  if (k != 2) throw std::runtime_error("not a matrix file: " + path);
  MatrixXd m(n, n);
  for (uint32_t r = 0; r < n; ++r)
    for (uint32_t c = 0; c < n; ++c) m(r, c) = get_f64(in);
  if (!in) throw std::runtime_error("truncated matrix file " + path);
  return m;
}

void write_instance(const std::string& path, const SpikedInstance& inst) {
  write_tensor(path, inst.tensor);
  nlohmann::json j;
  j["tau"] = inst.tau;
  j["noise_kind"] = to_string(inst.noise_kind);
  j["seed"] = inst.seed;
  j["stream"] = inst.stream;
  j["v0"] = std::vector<double>(inst.v0.data(), inst.v0.data() + inst.v0.size());
  std::ofstream out(path + ".json");
  if (!out) throw std::runtime_error("cannot write " + path + ".json");
  out << j.dump(2) << "\n";
}

SpikedInstance read_instance(const std::string& path) {
  SpikedInstance inst;
  inst.tensor = read_tensor(path);
  std::ifstream in(path + ".json");
  if (!in) throw std::runtime_error("cannot read " + path + ".json");
  nlohmann::json j = nlohmann::json::parse(in);
  inst.tau = j.at("tau").get<double>();
  inst.noise_kind = noise_kind_from_string(j.at("noise_kind").get<std::string>());
  inst.seed = j.at("seed").get<uint64_t>();
  inst.stream = j.value("stream", uint64_t(0));
  auto v = j.at("v0").get<std::vector<double>>();
  inst.v0 = Eigen::Map<VectorXd>(v.data(), int64_t(v.size()));
  return inst;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_header() {
  return "algo,n,k,tau,seed,stream,correlation,corr_sq,matvecs,time_ms,verdict,lambda_cert";
}

std::string csv_line(const ResultRow& r) {
  std::string s;
  s += r.algo;
  s += ',' + std::to_string(r.n);
  s += ',' + std::to_string(r.k);
  s += ',' + format_double(r.tau);
  s += ',' + std::to_string(r.seed);
  s += ',' + std::to_string(r.stream);
  s += ',' + format_double(r.correlation);
  s += ',' + format_double(r.corr_sq);
  s += ',' + std::to_string(r.matvecs);
  s += ',' + format_double(r.time_ms);
  s += ',' + r.verdict;
  s += ',' + format_double(r.lambda_cert);
  return s;
}

void write_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << csv_header() << "\n";
  for (const auto& r : rows) out << csv_line(r) << "\n";
}

std::string rows_to_json(const std::vector<ResultRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"algo", r.algo}, {"n", r.n}, {"k", r.k}, {"tau", r.tau},
                   {"seed", r.seed}, {"stream", r.stream}, {"correlation", r.correlation},
                   {"corr_sq", r.corr_sq}, {"matvecs", r.matvecs}, {"time_ms", r.time_ms},
                   {"verdict", r.verdict}, {"lambda_cert", r.lambda_cert}});
  }
  return arr.dump(2);
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<double>& x, const std::vector<PlotSeries>& series,
                    bool loglog) {
  const int w = 720, h = 480, ml = 80, mr = 170, mt = 50, mb = 60;
  auto tx = [&](double v) { return loglog ? std::log10(std::max(v, 1e-300)) : v; };
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (double v : x) {
    xmin = std::min(xmin, tx(v));
    xmax = std::max(xmax, tx(v));
  }
  for (const auto& s : series)
    for (size_t i = 0; i < s.y.size(); ++i) {
      double e = i < s.yerr.size() ? s.yerr[i] : 0.0;
      ymin = std::min(ymin, tx(s.y[i] - e));
      ymax = std::max(ymax, tx(s.y[i] + e));
    }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double v) { return h - mb - (tx(v) - ymin) / (ymax - ymin) * (h - mt - mb); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
      << "</text>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"" << h - 14 << "\" text-anchor=\"middle\" font-size=\"13\">"
      << xlabel << "</text>\n";
  out << "<text x=\"18\" y=\"" << h / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << h / 2 << ")\">" << ylabel << "</text>\n";
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr << "\" height=\""
      << h - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (size_t i = 0; i < x.size(); ++i) {
    out << "<text x=\"" << px(x[i]) << "\" y=\"" << h - mb + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << x[i] << "</text>\n";
  }
  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* col = colors[si % 5];
    out << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.y.size() && i < x.size(); ++i)
      out << px(x[i]) << ',' << py(s.y[i]) << ' ';
    out << "\"/>\n";
    for (size_t i = 0; i < s.y.size() && i < x.size(); ++i) {
      out << "<circle cx=\"" << px(x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << col
          << "\"/>\n";
      if (i < s.yerr.size() && s.yerr[i] > 0) {
        out << "<line x1=\"" << px(x[i]) << "\" y1=\"" << py(s.y[i] - s.yerr[i]) << "\" x2=\""
            << px(x[i]) << "\" y2=\"" << py(s.y[i] + s.yerr[i]) << "\" stroke=\"" << col
            << "\" stroke-width=\"1\"/>\n";
      }
    }
    out << "<text x=\"" << w - mr + 12 << "\" y=\"" << mt + 18 + 18 * int(si)
        << "\" font-size=\"12\" fill=\"" << col << "\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace tpca
