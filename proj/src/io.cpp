#include "aaseq/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "aaseq/error.hpp"
#include "format.hpp"

namespace aaseq {

namespace {

const char* const kTraceHeader = "iteration,mean_loss,accuracy";
const char* const kModelFormat = "aaseq-model";
const int kModelVersion = 1;

Error bad_trace(std::size_t line, const std::string& what) {
  return Error(ErrorKind::InvalidParameter, "parse_trace_csv",
               "line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path, const std::string& op) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, op, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "write", "cannot create '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::Io, "write", "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "write", "cannot rename into '" + path.string() + "'");
}

std::string content_digest(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return std::string("fnv1a64:") + buf;
}

std::string to_trace_csv(const TrainingTrace& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const TraceRecord& r : trace.records) {
    out += std::to_string(r.iteration);
    out += ',';
    out += detail::format_double(r.mean_loss);
    out += ',';
    out += detail::format_double(r.accuracy);
    out += '\n';
  }
  return out;
}

std::vector<TraceRecord> parse_trace_csv(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw bad_trace(1, "empty trace file");
  if (lines[0] != kTraceHeader) {
    throw bad_trace(1, "header must be '" + std::string(kTraceHeader) + "'");
  }
  std::vector<TraceRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = detail::split(lines[i], ',');
    if (fields.size() != 3) throw bad_trace(i + 1, "expected 3 fields");
    TraceRecord r;
    try {
      r.iteration = static_cast<int>(detail::parse_int(fields[0], "parse_trace_csv"));
      r.mean_loss = detail::parse_double(fields[1], "parse_trace_csv");
      r.accuracy = detail::parse_double(fields[2], "parse_trace_csv");
    } catch (const Error& e) {
      throw bad_trace(i + 1, e.what());
    }
    if (r.iteration != static_cast<int>(records.size()) + 1) {
      throw bad_trace(i + 1, "iteration " + std::to_string(r.iteration) + " out of sequence");
    }
    records.push_back(r);
  }
  if (records.empty()) throw bad_trace(2, "trace has no rows");
  return records;
}

std::string to_sweep_csv(const AlphaSweepResult& sweep) {
  std::string out = "alpha,final_loss,iterations_to_threshold,status\n";
  for (const AlphaRun& run : sweep.runs) {
    out += detail::format_double(run.alpha);
    out += ',';
    out += detail::format_double(run.final_loss);
    out += ',';
    out += run.iterations_to_threshold ? std::to_string(*run.iterations_to_threshold) : "none";
    out += ',';
    out += run.failed ? "failed" : "ok";
    out += '\n';
  }
  return out;
}

std::string to_model_text(const SavedModel& model) {
  KeyValueFile header;
  header.set("format", kModelFormat);
  header.set("version", std::to_string(kModelVersion));
  header.set("num_classes", std::to_string(model.weights.rows()));
  header.set("dim", std::to_string(model.weights.cols()));
  for (const std::string& c : model.classes) header.set("class", c);
  header.set("alpha", detail::format_double(model.config.alpha));
  header.set("iters", std::to_string(model.config.iters));
  header.set("seed", std::to_string(model.config.seed));
  header.set("norm", std::string(to_string(model.config.norm)));
  header.set("epsilon", detail::format_double(model.config.epsilon));
  header.set("step", detail::format_double(model.config.step));
  header.set("iteration", std::to_string(model.iteration));
  std::string out = header.to_text();
  out += "weights\n";
  for (Eigen::Index c = 0; c < model.weights.rows(); ++c) {
    for (Eigen::Index j = 0; j < model.weights.cols(); ++j) {
      if (j > 0) out += ',';
      out += detail::format_double(model.weights(c, j));
    }
    out += '\n';
  }
  return out;
}

SavedModel parse_model_text(std::string_view text) {
  const char* op = "parse_model_text";
  const auto lines = detail::split_lines(text);
  std::size_t i = 0;
  KeyValueFile header;
  std::vector<std::string> classes;
  for (; i < lines.size() && lines[i] != "weights"; ++i) {
    const auto eq = lines[i].find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::InvalidParameter, op, "line " + std::to_string(i + 1));
    }
    const std::string key(lines[i].substr(0, eq));
    std::string value(lines[i].substr(eq + 1));
    if (key == "class") {
      classes.push_back(std::move(value));
    } else {
      header.set(key, std::move(value));
    }
  }
  auto require = [&](const char* key) {
    auto v = header.get(key);
    if (!v) throw Error(ErrorKind::InvalidParameter, op, std::string("missing '") + key + "'");
    return *v;
  };
  if (require("format") != kModelFormat || require("version") != std::to_string(kModelVersion)) {
    throw Error(ErrorKind::InvalidParameter, op, "unsupported model format");
  }
  if (i == lines.size()) throw Error(ErrorKind::InvalidParameter, op, "missing weights");

  SavedModel model;
  model.classes = std::move(classes);
  const auto rows = detail::parse_int(require("num_classes"), op);
  const auto cols = detail::parse_int(require("dim"), op);
  if (rows < 1 || cols < 1 || static_cast<std::size_t>(rows) != model.classes.size()) {
    throw Error(ErrorKind::DimensionMismatch, op, "class count does not match num_classes");
  }
  model.config.alpha = detail::parse_double(require("alpha"), op);
  model.config.iters = static_cast<int>(detail::parse_int(require("iters"), op));
  model.config.seed = static_cast<std::uint64_t>(detail::parse_int(require("seed"), op));
  model.config.norm = parse_norm_mode(require("norm"));
  model.config.epsilon = detail::parse_double(require("epsilon"), op);
  model.config.step = detail::parse_double(require("step"), op);
  model.iteration = static_cast<int>(detail::parse_int(require("iteration"), op));
  model.weights.resize(rows, cols);
  for (Eigen::Index c = 0; c < rows; ++c) {
    const std::size_t li = i + 1 + static_cast<std::size_t>(c);
    if (li >= lines.size()) throw Error(ErrorKind::DimensionMismatch, op, "missing weight rows");
    const auto fields = detail::split(lines[li], ',');
    if (static_cast<Eigen::Index>(fields.size()) != cols) {
      throw Error(ErrorKind::DimensionMismatch, op, "weight row " + std::to_string(c));
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      model.weights(c, j) = detail::parse_double(fields[static_cast<std::size_t>(j)], op);
    }
  }
  return model;
}

void KeyValueFile::set(std::string key, std::string value) {
  entries_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
  // Last assignment wins.
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->first == key) return it->second;
  }
  return std::nullopt;
}

std::string KeyValueFile::to_text() const {
  std::string out;
  for (const auto& [key, value] : entries_) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  return out;
}

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile file;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(text)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw Error(ErrorKind::InvalidParameter, "parse_key_value",
                  "line " + std::to_string(line_no) + ": expected key=value");
    }
    file.set(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }
  return file;
}

}  // namespace aaseq
