// Copyright 2026 The zenoprep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "zenoprep/schedule.hpp"

namespace zenoprep {

inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 14695981039346656037ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

/// One binary record per point key under `dir`. Records carry their full key
/// and a checksum; unreadable or mismatching records count as misses.
class DiskPointStore : public PointStore {
 public:
  static constexpr char kMagic[8] = {'Z', 'P', 'P', 'O', 'I', 'N', 'T', '1'};

  explicit DiskPointStore(std::filesystem::path dir, std::ostream* warn = &std::cerr)
      : dir_(std::move(dir)), warn_(warn) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
      throw ConfigError("cache directory '" + dir_.string() + "' is not writable: " + ec.message());
  }

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path record_path(const std::string& key) const {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << fnv1a(key);
    return dir_ / (os.str() + ".zpt");
  }

  PointPtr load(const std::string& key) override {
    const auto path = record_path(key);
    std::ifstream in(path, std::ios::binary);
    if (!in) return nullptr;
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
      auto pt = decode(bytes, key);
      if (pt) ++hits_;
      return pt;
    } catch (const std::exception& e) {
      ++corrupt_;
      if (warn_) {
        std::lock_guard lock(warn_mutex_);
        *warn_ << "warning: ignoring corrupt cache record " << path.string() << " (" << e.what() << ")\n";
      }
      return nullptr;
    }
  }

  void store(const std::string& key, const SchedulePoint& p) override {
    const std::string bytes = encode(key, p);
    const auto path = record_path(key);
    std::ostringstream tmpname;
    tmpname << path.string() << ".tmp." << std::this_thread::get_id() << "." << counter_++;
    const std::filesystem::path tmp = tmpname.str();
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw ConfigError("cannot write cache record " + tmp.string());
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!out) throw ConfigError("cannot write cache record " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  }

  std::size_t hits() const { return hits_; }
  std::size_t corrupt_records() const { return corrupt_; }

  static std::string encode(const std::string& key, const SchedulePoint& p) {
    Writer w;
    w.raw(kMagic, sizeof kMagic);
    w.str(key);
    w.pod(p.s);
    const auto& sp = p.spectral;
    w.pod(sp.e0);
    w.pod(sp.e1);
    w.pod(sp.gap);
    w.vec(sp.ground_vector);
    w.vec(sp.excited_vector);
    w.pod(sp.residuals.ground);
    w.pod(sp.residuals.excited);
    w.pod(static_cast<std::int64_t>(sp.residuals.matvecs));
    w.pod(sp.residuals.penalty);
    w.pod(p.bounds.e_min);
    w.pod(p.bounds.e_max);
    w.pod(p.window.scale);
    w.pod(p.window.offset);
    w.pod(p.window.margin);
    w.pod(p.normalized_gap);
    w.pod(fnv1a(w.out.data(), w.out.size()));
    return w.out;
  }

  /// nullptr when the record belongs to another key (hash collision).
  static PointPtr decode(const std::string& bytes, const std::string& key) {
    if (bytes.size() < sizeof kMagic + sizeof(std::uint64_t)) throw Error("truncated record");
    const std::size_t body = bytes.size() - sizeof(std::uint64_t);
    std::uint64_t sum = 0;
    std::memcpy(&sum, bytes.data() + body, sizeof sum);
    if (sum != fnv1a(bytes.data(), body)) throw Error("checksum mismatch");
    Reader r{bytes.data(), body, 0};
    char magic[sizeof kMagic];
    r.raw(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw Error("bad magic");
    if (r.str() != key) return nullptr;
    auto p = std::make_shared<SchedulePoint>();
    p->s = r.pod<double>();
    auto& sp = p->spectral;
    sp.e0 = r.pod<double>();
    sp.e1 = r.pod<double>();
    sp.gap = r.pod<double>();
    sp.ground_vector = r.vec();
    sp.excited_vector = r.vec();
    sp.residuals.ground = r.pod<double>();
    sp.residuals.excited = r.pod<double>();
    sp.residuals.matvecs = static_cast<int>(r.pod<std::int64_t>());
    sp.residuals.penalty = r.pod<double>();
    p->bounds.e_min = r.pod<double>();
    p->bounds.e_max = r.pod<double>();
    p->window.scale = r.pod<double>();
    p->window.offset = r.pod<double>();
    p->window.margin = r.pod<double>();
    p->normalized_gap = r.pod<double>();
    if (r.pos != r.size) throw Error("trailing bytes");
    return p;
  }

 private:
  struct Writer {
    std::string out;
    void raw(const void* d, std::size_t n) { out.append(static_cast<const char*>(d), n); }
    template <class T>
    void pod(T v) {
      static_assert(std::is_trivially_copyable_v<T>);
      raw(&v, sizeof v);
    }
    void str(const std::string& s) {
      pod(static_cast<std::uint64_t>(s.size()));
      raw(s.data(), s.size());
    }
    void vec(const Vector& v) {
      pod(static_cast<std::uint64_t>(v.size()));
      raw(v.data(), v.size() * sizeof(double));
    }
  };

  struct Reader {
    const char* data;
    std::size_t size;
    std::size_t pos;
    void raw(void* d, std::size_t n) {
      if (n > size - pos) throw Error("truncated record");
      std::memcpy(d, data + pos, n);
      pos += n;
    }
    template <class T>
    T pod() {
      T v;
      raw(&v, sizeof v);
      return v;
    }
    std::string str() {
      const auto n = pod<std::uint64_t>();
      if (n > size - pos) throw Error("truncated record");
      std::string s(data + pos, n);
      pos += n;
      return s;
    }
    Vector vec() {
      const auto n = pod<std::uint64_t>();
      if (n > (size - pos) / sizeof(double)) throw Error("truncated record");
      Vector v(n);
      raw(v.data(), n * sizeof(double));
      return v;
    }
  };

  std::filesystem::path dir_;
  std::ostream* warn_;
  std::mutex warn_mutex_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> corrupt_{0};
  std::atomic<std::uint64_t> counter_{0};
};

}  // namespace zenoprep
