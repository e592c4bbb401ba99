#include "chromainv/io.hpp"

#include "chromainv/error.hpp"
#include "chromainv/serialization.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace chromainv {
namespace {

static_assert(std::endian::native == std::endian::little, "dataset files are little-endian float64");

constexpr int kDatasetFormatVersion = 1;

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out)
{
  std::ofstream os(path, mode);
  if (!os)
    throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

std::vector<std::string> split_csv_line(const std::string& line)
{
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != ' ' && c != '\t') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_cell(const std::string& s, const std::filesystem::path& path, std::size_t line)
{
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size())
    throw ValidationError(path.string() + ":" + std::to_string(line) + ": malformed number '" + s + "'");
  return v;
}

} // namespace

std::string format_number(double value)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

void write_chromatogram_csv(const std::filesystem::path& path, const Chromatogram& c)
{
  auto os = open_out(path);
  os << "t,response\n";
  for (std::size_t i = 0; i < c.time.size(); ++i)
    os << format_number(c.time[i]) << ',' << format_number(c.response[i]) << '\n';
  if (!os)
    throw IoError("failed writing " + path.string());
}

Chromatogram read_chromatogram_csv(const std::filesystem::path& path)
{
  std::ifstream is(path);
  if (!is)
    throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line))
    throw ValidationError(path.string() + ": empty file");
  const auto header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "t" || header[1] != "response")
    throw ValidationError(path.string() + ": expected header 't,response'");
  Chromatogram c;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r")
      continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 2)
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected 2 columns");
    c.time.push_back(parse_cell(cells[0], path, lineno));
    c.response.push_back(parse_cell(cells[1], path, lineno));
  }
  c.validate();
  return c;
}

void write_outlet_csv(const std::filesystem::path& path, const OutletSeries& outlet)
{
  auto os = open_out(path);
  os << "t,c1,c2\n";
  for (std::size_t i = 0; i < outlet.time.size(); ++i)
    os << format_number(outlet.time[i]) << ',' << format_number(outlet.c1[i]) << ',' << format_number(outlet.c2[i])
       << '\n';
  if (!os)
    throw IoError("failed writing " + path.string());
}

void save_dataset(const std::filesystem::path& dir, const Dataset& ds)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const std::size_t nt = ds.n_time_points();
  Json meta;
  meta["format_version"] = kDatasetFormatVersion;
  meta["column"] = to_json(ds.meta.column);
  meta["detector"] = to_json(ds.meta.detector);
  meta["seed"] = ds.meta.seed;
  meta["canonical_sites"] = ds.meta.canonical_sites;
  meta["n_time_points"] = nt;
  meta["n_samples"] = ds.samples.size();
  meta["row_layout"] = "r_1..r_NT, hbar_1, hbar_2, y_1..y_8";
  meta["target_order"] = "a_I1, b_I1, a_II1, b_II1, a_I2, b_I2, a_II2, b_II2";
  meta["time_grid"] = ds.meta.time_grid;
  std::vector<std::string> origins;
  std::size_t n_real = 0;
  for (const auto& s : ds.samples) {
    origins.push_back(to_string(s.origin));
    n_real += s.origin == Origin::real ? 1 : 0;
  }
  meta["n_real"] = n_real;
  meta["origins"] = origins;
  write_json_file(dir / "meta.json", meta);

  auto os = open_out(dir / "samples.f64", std::ios::out | std::ios::binary);
  std::vector<double> row(nt + 2 + IsothermParams::size);
  for (const auto& s : ds.samples) {
    if (s.response.size() != nt)
      throw ValidationError("sample response length differs from the dataset grid");
    std::copy(s.response.begin(), s.response.end(), row.begin());
    row[nt] = s.injection[0];
    row[nt + 1] = s.injection[1];
    for (std::size_t j = 0; j < IsothermParams::size; ++j)
      row[nt + 2 + j] = s.target ? (*s.target)[j] : std::numeric_limits<double>::quiet_NaN();
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!os)
    throw IoError("failed writing samples.f64");
}

Dataset load_dataset(const std::filesystem::path& dir)
{
  const Json meta = read_json_file(dir / "meta.json");
  Dataset ds;
  try {
    if (meta.at("format_version").get<int>() != kDatasetFormatVersion)
      throw ValidationError("unsupported dataset format version");
    ds.meta.column = column_config_from_json(meta.at("column"));
    ds.meta.detector = detector_from_json(meta.at("detector"));
    ds.meta.seed = meta.at("seed").get<std::uint64_t>();
    ds.meta.canonical_sites = meta.value("canonical_sites", true);
    ds.meta.time_grid = meta.at("time_grid").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(dir.string() + "/meta.json: " + e.what());
  }
  const auto nt = meta.at("n_time_points").get<std::size_t>();
  const auto n = meta.at("n_samples").get<std::size_t>();
  const auto origins = meta.at("origins").get<std::vector<std::string>>();
  if (ds.meta.time_grid.size() != nt || origins.size() != n)
    throw ValidationError(dir.string() + "/meta.json: inconsistent sizes");

  std::ifstream is(dir / "samples.f64", std::ios::binary);
  if (!is)
    throw IoError("cannot open " + (dir / "samples.f64").string());
  std::vector<double> row(nt + 2 + IsothermParams::size);
  ds.samples.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!is.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double))))
      throw ValidationError(dir.string() + "/samples.f64: truncated at row " + std::to_string(k));
    Sample s;
    s.response.assign(row.begin(), row.begin() + static_cast<long>(nt));
    s.injection = {row[nt], row[nt + 1]};
    if (!std::isnan(row[nt + 2]))
      s.target = IsothermParams(std::span<const double>(row.data() + nt + 2, IsothermParams::size));
    s.origin = origins[k] == "real" ? Origin::real : Origin::synthetic;
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

void save_norm_stats(const std::filesystem::path& path, const NormStats& stats)
{
  Json j = to_json(stats);
  j["fingerprint"] = stats.fingerprint();
  write_json_file(path, j);
}

NormStats load_norm_stats(const std::filesystem::path& path) { return norm_stats_from_json(read_json_file(path)); }

std::string dataset_fingerprint(const Dataset& dataset)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](double x) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& s : dataset.samples) {
    for (double r : s.response)
      mix(r);
    mix(s.injection[0]);
    mix(s.injection[1]);
    if (s.target)
      for (double y : s.target->values())
        mix(y);
    mix(s.origin == Origin::real ? 1.0 : 0.0);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void save_model(const std::filesystem::path& path, const FnnModel& model, const NormStats& stats)
{
  write_json_file(path, to_json(model, stats.fingerprint()));
}

FnnModel load_model(const std::filesystem::path& path, const NormStats& stats)
{
  std::string fingerprint;
  FnnModel model = fnn_model_from_json(read_json_file(path), &fingerprint);
  if (fingerprint != stats.fingerprint())
    throw ValidationError(path.string() + " was trained with different normalization statistics");
  if (static_cast<std::size_t>(model.input_size()) != stats.size())
    throw ValidationError(path.string() + ": model input size does not match the statistics");
  return model;
}

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history)
{
  auto os = open_out(path);
  os << "epoch,loss,data_term,train_r2,val_r2\n";
  for (const auto& r : history)
    os << r.epoch << ',' << format_number(r.loss) << ',' << format_number(r.data_term) << ','
       << format_number(r.train_r2) << ',' << format_number(r.val_r2) << '\n';
  if (!os)
    throw IoError("failed writing " + path.string());
}

void write_grid_csv(const std::filesystem::path& path, const std::vector<GridRow>& rows)
{
  auto os = open_out(path);
  os << "hidden,loss,activation,alpha_b,alpha_w,train_r2,val_r2\n";
  for (const auto& r : rows)
    os << '"' << hidden_to_string(r.hp.hidden) << "\"," << to_string(r.hp.loss_norm) << ','
       << to_string(r.hp.activation) << ',' << format_number(r.hp.alpha_b) << ',' << format_number(r.hp.alpha_w)
       << ',' << format_number(r.train_r2) << ',' << format_number(r.val_r2) << '\n';
  if (!os)
    throw IoError("failed writing " + path.string());
}

void write_cv_csv(const std::filesystem::path& path, const CvReport& report)
{
  auto os = open_out(path);
  os << "fold,train_r2,val_r2,train_size,val_size\n";
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    const auto& r = report.folds[f];
    os << f + 1 << ',' << format_number(r.train_r2) << ',' << format_number(r.val_r2) << ',' << r.train_size << ','
       << r.val_size << '\n';
  }
  os << "mean," << format_number(report.mean_train_r2) << ',' << format_number(report.mean_val_r2) << ",,\n";
  if (!os)
    throw IoError("failed writing " + path.string());
}

} // namespace chromainv
