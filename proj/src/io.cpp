#include "eegfair/io.hpp"

#include "eegfair/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace eegfair {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  out.push_back(std::move(cell));
  return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw Error(ErrorKind::InvalidArgument, where + ": '" + s + "' is not a number");
  return v;
}

std::optional<double> parse_optional(const std::string& s, const std::string& where) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, where);
}

std::string row_context(std::size_t row, const std::string& column) {
  return "row " + std::to_string(row) + ", column " + column;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << contents;
}

std::vector<SubjectRecord> load_metadata(const fs::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) throw Error(ErrorKind::MissingColumn, path.string() + ": missing header");
  const auto& header = rows.front();
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  static const std::array<const char*, 8> required = {"subject_id",   "center",        "diagnosis",
                                                      "gender",       "age_years",     "updrs3_score",
                                                      "updrs_version", "duration_months"};
  for (const char* name : required)
    if (!col.contains(name)) throw Error(ErrorKind::MissingColumn, path.string() + ": header lacks '" + name + "'");

  std::vector<SubjectRecord> records;
  std::unordered_map<std::string, std::size_t> first_row;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() != header.size())
      throw Error(ErrorKind::InvalidArgument, "row " + std::to_string(r) + ": expected " +
                                                  std::to_string(header.size()) + " cells, found " +
                                                  std::to_string(cells.size()));
    const auto cell = [&](const char* name) -> const std::string& { return cells[col.at(name)]; };
    SubjectRecord rec;
    rec.subject_id = cell("subject_id");
    rec.center = cell("center");
    try {
      rec.diagnosis = parse_diagnosis(cell("diagnosis"));
    } catch (const Error& e) {
      throw Error(e.kind(), row_context(r, "diagnosis") + ": " + e.message());
    }
    try {
      rec.gender = parse_gender(cell("gender"));
    } catch (const Error& e) {
      throw Error(e.kind(), row_context(r, "gender") + ": " + e.message());
    }
    try {
      rec.updrs_version = cell("updrs_version").empty() ? UpdrsVersion::MDS_UPDRS
                                                          : parse_updrs_version(cell("updrs_version"));
    } catch (const Error& e) {
      throw Error(e.kind(), row_context(r, "updrs_version") + ": " + e.message());
    }
    rec.age_years = parse_double(cell("age_years"), row_context(r, "age_years"));
    rec.updrs3_score = parse_optional(cell("updrs3_score"), row_context(r, "updrs3_score"));
    rec.duration_months = parse_optional(cell("duration_months"), row_context(r, "duration_months"));

    if (auto [it, inserted] = first_row.emplace(rec.subject_id, r); !inserted)
      throw Error(ErrorKind::DuplicateSubject, row_context(r, "subject_id") + ": '" + rec.subject_id +
                                                   "' already defined on row " + std::to_string(it->second));
    try {
      validate_records({rec});
    } catch (const Error& e) {
      throw Error(e.kind(), "row " + std::to_string(r) + ": " + e.message());
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void save_metadata(const fs::path& path, const std::vector<SubjectRecord>& records) {
  validate_records(records);
  std::string out = kMetadataHeader;
  out += '\n';
  for (const auto& r : records) {
    out += r.subject_id + ',' + r.center + ',' + std::string(to_string(r.diagnosis)) + ',' +
           std::string(to_string(r.gender)) + ',' + format_double(r.age_years) + ',' +
           (r.updrs3_score ? format_double(*r.updrs3_score) : "") + ',' + std::string(to_string(r.updrs_version)) +
           ',' + (r.duration_months ? format_double(*r.duration_months) : "") + '\n';
  }
  write_text_file(path, out);
}

FeatureTable load_feature_table(const fs::path& path, bool allow_subset) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows.front().empty() || rows.front().front() != "subject_id")
    throw Error(ErrorKind::MissingColumn, path.string() + ": first column must be subject_id");
  const auto& header = rows.front();

  std::vector<FeatureKey> file_keys;
  for (std::size_t c = 1; c < header.size(); ++c) file_keys.push_back(parse_feature_key(header[c]));

  // Column permutation into canonical order.
  std::vector<std::size_t> order(file_keys.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return file_keys[a] < file_keys[b]; });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (file_keys[order[i]] == file_keys[order[i - 1]])
      throw Error(ErrorKind::InvalidArgument, path.string() + ": column " + file_keys[order[i]].name() + " repeated");
  if (!allow_subset && file_keys.size() != kNumFeatures) {
    for (const auto& k : all_feature_keys())
      if (std::find(file_keys.begin(), file_keys.end(), k) == file_keys.end())
        throw Error(ErrorKind::MissingColumn, path.string() + ": feature column " + k.name() + " absent");
  }

  FeatureTable table;
  for (auto i : order) table.keys.push_back(file_keys[i]);
  const auto n_rows = static_cast<Eigen::Index>(rows.size() - 1);
  table.values.resize(n_rows, static_cast<Eigen::Index>(order.size()));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() != header.size())
      throw Error(ErrorKind::InvalidArgument, path.string() + ": row " + std::to_string(r) + " has " +
                                                  std::to_string(cells.size()) + " cells");
    table.subject_ids.push_back(cells[0]);
    for (std::size_t j = 0; j < order.size(); ++j) {
      const auto where = row_context(r, header[order[j] + 1]);
      const double v = parse_double(cells[order[j] + 1], where);
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteValue, where + ": '" + cells[order[j] + 1] + "'");
      table.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(j)) = v;
    }
  }
  table.validate();
  return table;
}

void save_feature_table(const fs::path& path, const FeatureTable& table) {
  table.validate();
  std::string out = "subject_id";
  for (const auto& k : table.keys) out += ',' + k.name();
  out += '\n';
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    out += table.subject_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < table.cols(); ++j) {
      out += ',';
      out += format_double(table.values(i, j));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

void save_epoch_set(const fs::path& dir, const EpochSet& epochs) {
  epochs.validate();
  fs::create_directories(dir);
  const std::string data_name = epochs.subject_id + ".f64";
  json sidecar;
  sidecar["subject_id"] = epochs.subject_id;
  sidecar["sampling_rate_hz"] = epochs.sampling_rate_hz;
  std::vector<std::string> labels;
  for (auto c : epochs.channels) labels.emplace_back(channel_label(c));
  sidecar["channels"] = labels;
  sidecar["n_epochs"] = epochs.n_epochs();
  sidecar["n_samples"] = epochs.n_samples();
  sidecar["layout"] = "epochs,channels,samples";
  sidecar["dtype"] = "float64le";
  sidecar["data_file"] = data_name;
  write_text_file(dir / (epochs.subject_id + ".json"), sidecar.dump(2) + "\n");

  std::string bytes;
  bytes.reserve(epochs.n_epochs() * epochs.channels.size() * static_cast<std::size_t>(epochs.n_samples()) * 8);
  for (const auto& m : epochs.data)
    for (Eigen::Index c = 0; c < m.rows(); ++c)
      for (Eigen::Index s = 0; s < m.cols(); ++s) {
        auto bits = std::bit_cast<std::uint64_t>(m(c, s));
        for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
      }
  write_text_file(dir / data_name, bytes);
}

EpochSet load_epoch_set(const fs::path& sidecar_path) {
  json sidecar;
  try {
    sidecar = json::parse(read_text_file(sidecar_path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, sidecar_path.string() + ": " + e.what());
  }
  EpochSet out;
  std::string dtype, data_file;
  std::size_t n_epochs = 0;
  Eigen::Index n_samples = 0;
  try {
    out.subject_id = sidecar.at("subject_id").get<std::string>();
    out.sampling_rate_hz = sidecar.at("sampling_rate_hz").get<double>();
    for (const auto& label : sidecar.at("channels")) {
      const auto s = label.get<std::string>();
      const auto c = parse_channel(s);
      if (!c) throw Error(ErrorKind::UnknownChannel, "subject " + out.subject_id + ": channel '" + s + "'");
      out.channels.push_back(*c);
    }
    n_epochs = sidecar.at("n_epochs").get<std::size_t>();
    n_samples = sidecar.at("n_samples").get<Eigen::Index>();
    dtype = sidecar.value("dtype", std::string("float64le"));
    data_file = sidecar.at("data_file").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MissingColumn, sidecar_path.string() + ": " + e.what());
  }
  const auto n_channels = static_cast<Eigen::Index>(out.channels.size());
  const auto data_path = sidecar_path.parent_path() / data_file;
  out.data.assign(n_epochs, Eigen::MatrixXd(n_channels, n_samples));

  if (dtype == "float64le") {
    const auto bytes = read_text_file(data_path);
    const auto expected = n_epochs * static_cast<std::size_t>(n_channels * n_samples) * 8;
    if (bytes.size() != expected)
      throw Error(ErrorKind::InvalidArgument, data_path.string() + ": size " + std::to_string(bytes.size()) +
                                                  " bytes, expected " + std::to_string(expected));
    std::size_t pos = 0;
    for (auto& m : out.data)
      for (Eigen::Index c = 0; c < n_channels; ++c)
        for (Eigen::Index s = 0; s < n_samples; ++s) {
          std::uint64_t bits = 0;
          for (int b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos++])) << (8 * b);
          m(c, s) = std::bit_cast<double>(bits);
        }
  } else if (dtype == "csv") {
    const auto rows = read_csv(data_path);
    if (rows.size() != n_epochs * static_cast<std::size_t>(n_channels))
      throw Error(ErrorKind::InvalidArgument, data_path.string() + ": expected " +
                                                  std::to_string(n_epochs * n_channels) + " lines");
    std::size_t line = 0;
    for (auto& m : out.data)
      for (Eigen::Index c = 0; c < n_channels; ++c, ++line) {
        if (rows[line].size() != static_cast<std::size_t>(n_samples))
          throw Error(ErrorKind::InvalidArgument, data_path.string() + ": line " + std::to_string(line + 1) +
                                                      " has wrong sample count");
        for (Eigen::Index s = 0; s < n_samples; ++s)
          m(c, s) = parse_double(rows[line][static_cast<std::size_t>(s)], data_path.string());
      }
  } else {
    throw Error(ErrorKind::InvalidEnum, sidecar_path.string() + ": dtype '" + dtype + "'");
  }
  out.validate();
  return out;
}

std::vector<fs::path> list_epoch_sidecars(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace eegfair
