// SPDX-License-Identifier: Apache-2.0
#include "l0bnb/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace l0bnb {

namespace {

constexpr std::string_view kHeader = "l0bnb-instance v1";

// Guards against allocating storage for a corrupt header before any row has
// been parsed.
constexpr long kMaxDimension = 1000000;
constexpr long kMaxEntries = 100000000;

std::string location(int line, int column) {
  std::string out = "line " + std::to_string(line);
  if (column > 0) out += ", column " + std::to_string(column);
  return out;
}

}  // namespace

ParseError::ParseError(int line, const std::string& message)
    : std::runtime_error(location(line, 0) + ": " + message), line_(line) {}

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error(location(line, column) + ": " + message),
      line_(line) {}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

void write_instance(const std::filesystem::path& path, const Instance& inst,
                    const std::map<std::string, std::string>& metadata) {
  for (const auto& [key, value] : metadata) {
    if (key.empty() || key.find('=') != std::string::npos ||
        key.find_first_of("\r\n") != std::string::npos ||
        value.find_first_of("\r\n") != std::string::npos) {
      throw std::invalid_argument(
          "metadata keys must be nonempty single-line text without '='");
    }
  }

  std::string out;
  out.reserve(static_cast<std::size_t>(inst.rows()) *
              static_cast<std::size_t>(inst.cols() + 1) * 26);
  out += kHeader;
  out += '\n';
  out += std::to_string(inst.rows());
  out += ' ';
  out += std::to_string(inst.cols());
  out += ' ';
  out += format_double(inst.lambda());
  out += ' ';
  out += format_double(inst.big_m());
  out += '\n';
  for (const auto& [key, value] : metadata) {
    out += "# ";
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  for (int i = 0; i < inst.rows(); ++i) {
    for (int j = 0; j < inst.cols(); ++j) {
      if (j > 0) out += ' ';
      out += format_double(inst.a()(i, j));
    }
    out += '\n';
  }
  for (int i = 0; i < inst.rows(); ++i) {
    if (i > 0) out += ' ';
    out += format_double(inst.y()[i]);
  }
  out += '\n';

  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream file(temp, std::ios::binary | std::ios::trunc);
    if (!file) {
      throw std::runtime_error("cannot open '" + temp.string() +
                               "' for writing");
    }
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    file.flush();
    if (!file) {
      throw std::runtime_error("write failed for '" + temp.string() + "'");
    }
  }
  std::filesystem::rename(temp, path);
}

void write_instance(const std::filesystem::path& path,
                    const GeneratedInstance& gen) {
  std::map<std::string, std::string> metadata;
  metadata["setup"] = to_string(gen.setup);
  metadata["seed"] = std::to_string(gen.seed);
  metadata["sigma"] = format_double(gen.sigma);
  metadata["rng"] = kRngName;
  std::string support;
  for (Eigen::Index i = 0; i < gen.x_true.size(); ++i) {
    if (std::abs(gen.x_true[i]) > kSupportZeroTol) {
      if (!support.empty()) support += ',';
      support += std::to_string(i);
    }
  }
  metadata["x_true_support"] = support;
  if (gen.setup == Setup::kToeplitz) {
    metadata["sinc_width"] = format_double(gen.sinc_width);
  }
  write_instance(path, gen.instance, metadata);
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string text) : text_(std::move(text)) {}

  // Next line without its terminator; false at end of input.
  bool next(std::string_view& line) {
    if (position_ >= text_.size()) return false;
    ++line_number_;
    const std::size_t end = text_.find('\n', position_);
    const std::size_t stop = end == std::string::npos ? text_.size() : end;
    line = std::string_view(text_).substr(position_, stop - position_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    position_ = end == std::string::npos ? text_.size() : end + 1;
    return true;
  }

  int line_number() const { return line_number_; }

 private:
  std::string text_;
  std::size_t position_ = 0;
  int line_number_ = 0;
};

struct Token {
  std::string_view text;
  int column;  // 1-based offset of the first character
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ' || line[i] == '\t') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

double parse_double(const Token& token, int line) {
  double value = 0.0;
  const char* first = token.text.data();
  const char* last = first + token.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line, token.column,
                     "malformed number '" + std::string(token.text) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(line, token.column, "non-finite value");
  }
  return value;
}

long parse_count(const Token& token, int line, const char* what) {
  long value = 0;
  const char* first = token.text.data();
  const char* last = first + token.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line, token.column,
                     std::string("malformed ") + what + " '" +
                         std::string(token.text) + "'");
  }
  return value;
}

}  // namespace

InstanceData read_instance(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("cannot open '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();
  LineReader reader(std::move(buffer).str());

  std::string_view line;
  if (!reader.next(line)) {
    throw ParseError(1, "empty file; expected header '" +
                            std::string(kHeader) + "'");
  }
  if (line != kHeader) {
    throw ParseError(1, "unrecognized header; expected '" +
                            std::string(kHeader) + "'");
  }

  if (!reader.next(line)) {
    throw ParseError(2, "unexpected end of file; expected 'm n lambda M'");
  }
  const auto header = tokenize(line);
  if (header.size() != 4) {
    throw ParseError(2, "expected 'm n lambda M'");
  }
  const long m = parse_count(header[0], 2, "row count");
  const long n = parse_count(header[1], 2, "column count");
  if (m < 1) throw ParseError(2, header[0].column, "m must be at least 1");
  if (n < 1) throw ParseError(2, header[1].column, "n must be at least 1");
  if (m > kMaxDimension || n > kMaxDimension || m * n > kMaxEntries) {
    throw ParseError(2, "declared dimensions are unreasonably large");
  }
  const double lambda = parse_double(header[2], 2);
  if (!(lambda > 0.0)) {
    throw ParseError(2, header[2].column, "lambda must be positive");
  }
  const double big_m = parse_double(header[3], 2);
  if (!(big_m > 0.0)) {
    throw ParseError(2, header[3].column, "M must be positive");
  }

  std::map<std::string, std::string> metadata;
  bool have_line = reader.next(line);
  while (have_line && !line.empty() && line[0] == '#') {
    const int at = reader.line_number();
    if (line.size() < 2 || line[1] != ' ') {
      throw ParseError(at, "metadata line must be '# key=value'");
    }
    const std::string_view body = line.substr(2);
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ParseError(at, "metadata line must be '# key=value'");
    }
    const std::string key(body.substr(0, eq));
    if (metadata.contains(key)) {
      throw ParseError(at, "duplicate metadata key '" + key + "'");
    }
    metadata.emplace(key, std::string(body.substr(eq + 1)));
    have_line = reader.next(line);
  }

  Eigen::MatrixXd a(m, n);
  for (long r = 0; r < m; ++r) {
    if (!have_line) {
      throw ParseError(reader.line_number() + 1,
                       "unexpected end of file inside the matrix rows");
    }
    const auto tokens = tokenize(line);
    if (static_cast<long>(tokens.size()) != n) {
      throw ParseError(reader.line_number(),
                       "row " + std::to_string(r + 1) + " has " +
                           std::to_string(tokens.size()) + " values, expected " +
                           std::to_string(n));
    }
    for (long c = 0; c < n; ++c) {
      a(r, c) = parse_double(tokens[static_cast<std::size_t>(c)],
                             reader.line_number());
    }
    have_line = reader.next(line);
  }

  if (!have_line) {
    throw ParseError(reader.line_number() + 1,
                     "unexpected end of file; expected the observation line");
  }
  const auto y_tokens = tokenize(line);
  if (static_cast<long>(y_tokens.size()) != m) {
    throw ParseError(reader.line_number(),
                     "observation line has " + std::to_string(y_tokens.size()) +
                         " values, expected " + std::to_string(m));
  }
  Eigen::VectorXd y(m);
  for (long i = 0; i < m; ++i) {
    y[i] = parse_double(y_tokens[static_cast<std::size_t>(i)],
                        reader.line_number());
  }

  while (reader.next(line)) {
    if (!tokenize(line).empty()) {
      throw ParseError(reader.line_number(), "unexpected trailing content");
    }
  }

  return InstanceData{Instance(std::move(a), std::move(y), lambda, big_m),
                      std::move(metadata)};
}

}  // namespace l0bnb
