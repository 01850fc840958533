/*
 * Copyright 2026 The SAGE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Reader/writer for NPY v1.0 arrays of little-endian float32 ('<f4') in C
// order. Headers are written exactly as numpy.save emits them: the dict
// literal, space padding and a trailing newline such that the data section
// starts on a 64-byte boundary.

#ifndef SAGE_NPY_HPP_
#define SAGE_NPY_HPP_

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sage/error.hpp"

namespace sage::npy {

inline constexpr std::string_view kMagic = "\x93NUMPY";
inline constexpr std::size_t kAlignment = 64;

struct Array {
  std::vector<std::size_t> shape;
  std::vector<float> data;

  bool operator==(const Array&) const = default;
};

inline std::size_t element_count(std::span<const std::size_t> shape) {
  std::size_t count = 1;
  for (std::size_t extent : shape) count *= extent;
  return count;
}

inline std::string shape_string(std::span<const std::size_t> shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(shape[i]);
  }
  if (shape.size() == 1) out += ",";
  out += ")";
  return out;
}

// Full preamble (magic, version, length, dict, padding, newline).
inline std::string encode_header(std::span<const std::size_t> shape) {
  std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': " +
                     shape_string(shape) + ", }";
  const std::size_t fixed = kMagic.size() + 2 + 2;
  std::size_t total = fixed + dict.size() + 1;
  const std::size_t padded = (total + kAlignment - 1) / kAlignment * kAlignment;
  dict.append(padded - total, ' ');
  dict.push_back('\n');

  std::string out(kMagic);
  out.push_back('\x01');
  out.push_back('\x00');
  const auto header_len = static_cast<std::uint16_t>(dict.size());
  out.push_back(static_cast<char>(header_len & 0xFF));
  out.push_back(static_cast<char>((header_len >> 8) & 0xFF));
  out += dict;
  return out;
}

namespace detail {

inline std::uint32_t to_little_endian(std::uint32_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((bits & 0xFF) << 24) | ((bits & 0xFF00) << 8) |
           ((bits >> 8) & 0xFF00) | (bits >> 24);
  }
  return bits;
}

class HeaderParser {
 public:
  HeaderParser(std::string_view text, std::string label)
      : text_(text), label_(std::move(label)) {}

  // Positions the cursor just past "'key':".
  void seek_key(std::string_view key) {
    for (char quote : {'\'', '"'}) {
      std::string needle;
      needle.push_back(quote);
      needle += key;
      needle.push_back(quote);
      const auto at = text_.find(needle);
      if (at == std::string_view::npos) continue;
      pos_ = at + needle.size();
      skip_space();
      expect(':');
      skip_space();
      return;
    }
    malformed("missing key '" + std::string(key) + "'");
  }

  std::string read_string() {
    const char quote = peek();
    if (quote != '\'' && quote != '"') malformed("expected string literal");
    ++pos_;
    const auto end = text_.find(quote, pos_);
    if (end == std::string_view::npos) malformed("unterminated string");
    std::string value(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return value;
  }

  bool read_bool() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    malformed("expected True or False");
  }

  std::vector<std::size_t> read_shape() {
    expect('(');
    std::vector<std::size_t> shape;
    for (;;) {
      skip_space();
      if (peek() == ')') {
        ++pos_;
        return shape;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        malformed("expected shape extent");
      }
      std::size_t value = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        value = value * 10 + static_cast<std::size_t>(peek() - '0');
        ++pos_;
      }
      shape.push_back(value);
      skip_space();
      if (peek() == ',') ++pos_;
    }
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }
  void expect(char c) {
    if (peek() != c) malformed(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void malformed(const std::string& what) const {
    fail(ErrorCode::kMalformedHeader, label_ + ": " + what);
  }

  std::string_view text_;
  std::string label_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string encode(std::span<const std::size_t> shape,
                          std::span<const float> values) {
  if (element_count(shape) != values.size()) {
    fail(ErrorCode::kShapeMismatch,
         "npy encode: shape " + shape_string(shape) + " holds " +
             std::to_string(element_count(shape)) + " values, got " +
             std::to_string(values.size()));
  }
  std::string out = encode_header(shape);
  const std::size_t offset = out.size();
  out.resize(offset + values.size() * sizeof(float));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint32_t bits =
        detail::to_little_endian(std::bit_cast<std::uint32_t>(values[i]));
    std::memcpy(out.data() + offset + i * sizeof(float), &bits, sizeof(bits));
  }
  return out;
}

// `label` names the array in error messages (usually the file path).
inline Array decode(std::string_view bytes, const std::string& label) {
  const std::size_t preamble = kMagic.size() + 4;
  if (bytes.size() < preamble || bytes.substr(0, kMagic.size()) != kMagic) {
    fail(ErrorCode::kMalformedHeader, label + ": bad NPY magic");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  const auto minor = static_cast<unsigned char>(bytes[7]);
  if (major != 1 || minor != 0) {
    fail(ErrorCode::kMalformedHeader,
         label + ": unsupported NPY version " + std::to_string(major) + "." +
             std::to_string(minor) + " (expected 1.0)");
  }
  const std::size_t header_len =
      static_cast<unsigned char>(bytes[8]) |
      (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
  if (bytes.size() < preamble + header_len) {
    fail(ErrorCode::kMalformedHeader, label + ": truncated header");
  }
  const std::string_view header = bytes.substr(preamble, header_len);

  detail::HeaderParser parser(header, label);
  parser.seek_key("descr");
  const std::string descr = parser.read_string();
  if (descr != "<f4") {
    fail(ErrorCode::kMalformedHeader,
         label + ": dtype '" + descr + "' is not '<f4'");
  }
  parser.seek_key("fortran_order");
  if (parser.read_bool()) {
    fail(ErrorCode::kMalformedHeader, label + ": fortran_order arrays are not supported");
  }
  parser.seek_key("shape");
  Array array;
  array.shape = parser.read_shape();

  const std::size_t count = element_count(array.shape);
  const std::string_view payload = bytes.substr(preamble + header_len);
  if (payload.size() != count * sizeof(float)) {
    fail(ErrorCode::kMalformedHeader,
         label + ": data section holds " + std::to_string(payload.size()) +
             " bytes, shape " + shape_string(array.shape) + " needs " +
             std::to_string(count * sizeof(float)));
  }
  array.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, payload.data() + i * sizeof(float), sizeof(bits));
    array.data[i] = std::bit_cast<float>(detail::to_little_endian(bits));
  }
  return array;
}

inline void write(const std::filesystem::path& path,
                  std::span<const std::size_t> shape,
                  std::span<const float> values) {
  const std::string bytes = encode(shape, values);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIoError, "short write to " + path.string());
}

inline Array read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kMissingFile, "cannot open " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in),
                          std::istreambuf_iterator<char>()};
  return decode(bytes, path.string());
}

}  // namespace sage::npy

#endif  // SAGE_NPY_HPP_
