// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "l0bnb/datagen.hpp"
#include "l0bnb/instance.hpp"

namespace l0bnb {

/// Parse or validation failure; the message always carries the 1-based line
/// number, and the column where one applies.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message);
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }

 private:
  int line_ = 0;
};

struct InstanceData {
  Instance instance;
  std::map<std::string, std::string> metadata;
};

/// Shortest-of-17-significant-digits decimal form; round-trips any double.
std::string format_double(double value);

/// Text format, one file per instance:
///   l0bnb-instance v1
///   <m> <n> <lambda> <M>
///   # key=value              (zero or more)
///   <m rows of n entries>    (dictionary, row-major)
///   <m entries>              (observation)
/// Numbers are written in the shortest decimal form that parses back to the
/// identical double, never more than 17 significant digits. The file is
/// written to a temporary sibling and renamed into place.
void write_instance(const std::filesystem::path& path, const Instance& inst,
                    const std::map<std::string, std::string>& metadata = {});

/// Writes the instance along with its generation metadata: setup, seed,
/// sigma, planted support, sampler name, and the sinc width where one was
/// used.
void write_instance(const std::filesystem::path& path,
                    const GeneratedInstance& gen);

/// Inverse of write_instance. Numeric fields round-trip exactly; dimension
/// and validity violations raise ParseError with the offending line.
InstanceData read_instance(const std::filesystem::path& path);

}  // namespace l0bnb
