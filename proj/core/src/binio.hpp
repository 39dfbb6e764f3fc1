// Copyright 2026 The lrnmt Authors.
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
// Internal little-endian binary IO with a running FNV-1a digest, shared by
// the checkpoint writers. Not installed.

#ifndef LRNMT_SRC_BINIO_HPP_
#define LRNMT_SRC_BINIO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "lrnmt/error.hpp"

namespace lrnmt::binio {

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) fail(ErrorCode::io, "cannot open for writing: " + path);
  }

  void bytes(const void* data, size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }

  void u8(uint8_t v) { bytes(&v, 1); }
  void u32(uint32_t v) { bytes(&v, 4); }
  void u64(uint64_t v) { bytes(&v, 8); }
  void i32(int32_t v) { bytes(&v, 4); }
  void f32(float v) { bytes(&v, 4); }

  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

  // Trailer: digest of everything written so far (not itself hashed).
  void finish_with_digest() {
    const uint64_t digest = hash_;
    out_.write(reinterpret_cast<const char*>(&digest), 8);
    out_.flush();
    if (!out_) fail(ErrorCode::io, "short write while saving checkpoint");
  }

 private:
  std::ofstream out_;
  uint64_t hash_ = 0xcbf29ce484222325ULL;
};

class Reader {
 public:
  explicit Reader(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open for reading: " + path);
    buf_.assign(std::istreambuf_iterator<char>(in),
                std::istreambuf_iterator<char>());
  }

  void bytes(void* data, size_t n) {
    if (pos_ + n > payload_size()) {
      fail(ErrorCode::corrupt_checkpoint, "truncated checkpoint");
    }
    std::memcpy(data, buf_.data() + pos_, n);
    pos_ += n;
  }

  uint8_t u8() { uint8_t v; bytes(&v, 1); return v; }
  uint32_t u32() { uint32_t v; bytes(&v, 4); return v; }
  uint64_t u64() { uint64_t v; bytes(&v, 8); return v; }
  int32_t i32() { int32_t v; bytes(&v, 4); return v; }
  float f32() { float v; bytes(&v, 4); return v; }

  std::string str() {
    const uint32_t n = u32();
    if (n > payload_size() - pos_) {
      fail(ErrorCode::corrupt_checkpoint, "truncated checkpoint string");
    }
    std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  // Verifies the 8-byte FNV trailer over the payload.
  void verify_digest() const {
    if (buf_.size() < 8) {
      fail(ErrorCode::corrupt_checkpoint, "checkpoint too small");
    }
    uint64_t h = 0xcbf29ce484222325ULL;
    for (size_t i = 0; i + 8 < buf_.size(); ++i) {
      h ^= static_cast<unsigned char>(buf_[i]);
      h *= 0x100000001b3ULL;
    }
    uint64_t stored;
    std::memcpy(&stored, buf_.data() + buf_.size() - 8, 8);
    if (stored != h) {
      fail(ErrorCode::corrupt_checkpoint, "checkpoint digest mismatch");
    }
  }

  size_t payload_size() const { return buf_.size() < 8 ? 0 : buf_.size() - 8; }

 private:
  std::vector<unsigned char> buf_;
  size_t pos_ = 0;
};

}  // namespace lrnmt::binio

#endif  // LRNMT_SRC_BINIO_HPP_
