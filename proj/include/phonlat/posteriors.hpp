// Copyright 2026 The Phonlat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Per-frame phoneme posterior distributions: T rows over K+1 columns
// (tokens in alphabet order, blank last).  Rows must sum to 1 within 1e-6;
// out-of-tolerance rows are rejected rather than renormalized so producer
// bugs surface immediately.
//
// Text file format:   header "T K+1 alphabet_hash", then T rows.
// Binary file format: 16-byte header (8-byte magic "PHLATPOS", uint32 T,
// uint32 K+1, little endian), then T*(K+1) little-endian float32 values.

#ifndef PHONLAT_POSTERIORS_HPP_
#define PHONLAT_POSTERIORS_HPP_

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "phonlat/alphabet.hpp"
#include "phonlat/error.hpp"
#include "phonlat/util.hpp"

namespace phonlat {

constexpr char kPosteriorMagic[8] = {'P', 'H', 'L', 'A', 'T', 'P', 'O', 'S'};
constexpr double kRowSumTolerance = 1e-6;

class PosteriorSequence {
 public:
  // Validating constructor: dimension, nonnegativity, and row-sum checks.
  static PosteriorSequence checked(std::vector<std::vector<double>> rows,
                                   const PhonemeAlphabet& alphabet) {
    if (rows.empty()) throw Error("posterior sequence must have T >= 1");
    const std::size_t cols = static_cast<std::size_t>(alphabet.columns());
    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (rows[t].size() != cols) {
        throw Error("posterior row " + std::to_string(t) + " has " +
                    std::to_string(rows[t].size()) + " columns, expected " +
                    std::to_string(cols));
      }
      double sum = 0.0;
      for (double v : rows[t]) {
        if (!(v >= 0.0)) {  // also catches NaN
          throw Error("posterior row " + std::to_string(t) +
                      " has a negative or NaN entry");
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        throw Error("posterior row " + std::to_string(t) + " sums to " +
                    format_weight(sum) + ", outside 1 +/- 1e-6");
      }
    }
    return PosteriorSequence(std::move(rows), alphabet);
  }

  // Skips the row-sum and nonnegativity checks.  Exists for tests that
  // probe the likelihood off the probability simplex (finite differences);
  // production readers always go through checked().
  static PosteriorSequence unchecked(std::vector<std::vector<double>> rows,
                                     const PhonemeAlphabet& alphabet) {
    if (rows.empty()) throw Error("posterior sequence must have T >= 1");
    const std::size_t cols = static_cast<std::size_t>(alphabet.columns());
    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (rows[t].size() != cols) {
        throw Error("posterior row " + std::to_string(t) + " has " +
                    std::to_string(rows[t].size()) + " columns, expected " +
                    std::to_string(cols));
      }
    }
    return PosteriorSequence(std::move(rows), alphabet);
  }

  int frames() const { return static_cast<int>(rows_.size()); }
  int columns() const { return static_cast<int>(rows_[0].size()); }

  double prob(int t, int col) const { return rows_[t][col]; }
  const std::vector<double>& row(int t) const { return rows_[t]; }
  const PhonemeAlphabet& alphabet() const { return alphabet_; }

  std::string to_text() const {
    std::string out = std::to_string(frames()) + " " +
                      std::to_string(columns()) + " " +
                      alphabet_.hash_hex() + "\n";
    for (const auto& row : rows_) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (k > 0) out += " ";
        out += format_weight(row[k]);
      }
      out += "\n";
    }
    return out;
  }

  static PosteriorSequence from_text(const std::string& text,
                                     const PhonemeAlphabet& alphabet,
                                     const std::string& filename = "<posteriors>") {
    std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) throw DataError(filename, 1, "empty posterior file");
    std::vector<std::string> head = split_fields(lines[0]);
    if (head.size() != 3) {
      throw DataError(filename, 1, "expected header 'T K+1 alphabet_hash'");
    }
    auto t_count = parse_int(head[0]);
    auto col_count = parse_int(head[1]);
    if (!t_count || !col_count || *t_count < 1 || *col_count < 2) {
      throw DataError(filename, 1, "bad posterior dimensions");
    }
    if (head[2] != alphabet.hash_hex()) {
      throw DataError(filename, 1,
                      "alphabet hash mismatch: file has " + head[2] +
                          ", expected " + alphabet.hash_hex());
    }
    if (*col_count != alphabet.columns()) {
      throw DataError(filename, 1,
                      "column count " + head[1] + " does not match alphabet");
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(*t_count));
    std::size_t ln = 1;
    for (; ln < lines.size(); ++ln) {
      if (trim(lines[ln]).empty()) continue;
      std::vector<std::string> fields = split_fields(lines[ln]);
      if (static_cast<std::int64_t>(fields.size()) != *col_count) {
        throw DataError(filename, ln + 1,
                        "expected " + head[1] + " probabilities");
      }
      std::vector<double> row;
      row.reserve(fields.size());
      for (const std::string& f : fields) {
        auto v = parse_double(f);
        if (!v) throw DataError(filename, ln + 1, "bad probability: " + f);
        row.push_back(*v);
      }
      rows.push_back(std::move(row));
    }
    if (static_cast<std::int64_t>(rows.size()) != *t_count) {
      throw DataError(filename, ln,
                      "frame count mismatch: header declares " + head[0] +
                          ", found " + std::to_string(rows.size()));
    }
    try {
      return checked(std::move(rows), alphabet);
    } catch (const Error& e) {
      throw DataError(filename + ": " + e.what());
    }
  }

  std::string to_binary() const {
    std::string out(kPosteriorMagic, sizeof(kPosteriorMagic));
    append_u32(out, static_cast<std::uint32_t>(frames()));
    append_u32(out, static_cast<std::uint32_t>(columns()));
    for (const auto& row : rows_) {
      for (double v : row) {
        append_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      }
    }
    return out;
  }

  static PosteriorSequence from_binary(const std::string& bytes,
                                       const PhonemeAlphabet& alphabet,
                                       const std::string& filename = "<posteriors>") {
    if (bytes.size() < 16 ||
        bytes.compare(0, sizeof(kPosteriorMagic), kPosteriorMagic,
                      sizeof(kPosteriorMagic)) != 0) {
      throw DataError(filename + ": missing posterior binary magic");
    }
    std::uint32_t t_count = read_u32(bytes, 8);
    std::uint32_t cols = read_u32(bytes, 12);
    if (t_count < 1 || cols != static_cast<std::uint32_t>(alphabet.columns())) {
      throw DataError(filename + ": dimensions do not match alphabet");
    }
    std::size_t expected = 16 + 4ull * t_count * cols;
    if (bytes.size() != expected) {
      throw DataError(filename + ": file size " +
                      std::to_string(bytes.size()) + ", expected " +
                      std::to_string(expected));
    }
    std::vector<std::vector<double>> rows(t_count,
                                          std::vector<double>(cols, 0.0));
    std::size_t off = 16;
    for (std::uint32_t t = 0; t < t_count; ++t) {
      for (std::uint32_t k = 0; k < cols; ++k, off += 4) {
        rows[t][k] = static_cast<double>(
            std::bit_cast<float>(read_u32(bytes, off)));
      }
    }
    try {
      return checked(std::move(rows), alphabet);
    } catch (const Error& e) {
      throw DataError(filename + ": " + e.what());
    }
  }

  // Reads either representation, sniffing the binary magic.
  static PosteriorSequence load(const std::string& path,
                                const PhonemeAlphabet& alphabet) {
    std::string bytes = read_file(path);
    if (bytes.size() >= sizeof(kPosteriorMagic) &&
        bytes.compare(0, sizeof(kPosteriorMagic), kPosteriorMagic,
                      sizeof(kPosteriorMagic)) == 0) {
      return from_binary(bytes, alphabet, path);
    }
    return from_text(bytes, alphabet, path);
  }

  void save_text(const std::string& path) const {
    atomic_write_file(path, to_text());
  }
  void save_binary(const std::string& path) const {
    atomic_write_file(path, to_binary());
  }

 private:
  PosteriorSequence(std::vector<std::vector<double>> rows,
                    const PhonemeAlphabet& alphabet)
      : rows_(std::move(rows)), alphabet_(alphabet) {}

  static void append_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
  }

  static std::uint32_t read_u32(const std::string& s, std::size_t off) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(s[off])) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 1]))
            << 8) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 2]))
            << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 3]))
            << 24);
  }

  std::vector<std::vector<double>> rows_;
  PhonemeAlphabet alphabet_;
};

}  // namespace phonlat

#endif  // PHONLAT_POSTERIORS_HPP_
