#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ragq {

// Little-endian byte stream used by the model file format:
//
//   "RAGQMODL" | u64 version | string kind | body
//
// where strings are u64 length + bytes and every real is an IEEE-754 binary64.
class BinaryWriter {
 public:
  void u64(std::uint64_t v);
  void f64(double v);
  void str(const std::string& s);
  void f64s(std::span<const double> v);
  void u64s(std::span<const std::uint64_t> v);
  void raw(std::string_view bytes) { buf_.append(bytes); }
  const std::string& bytes() const noexcept { return buf_; }

 private:
  std::string buf_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::string bytes) : buf_(std::move(bytes)) {}
  std::uint64_t u64();
  double f64();
  std::string str();
  std::vector<double> f64s();
  std::vector<std::uint64_t> u64s();
  std::string raw(std::size_t n);
  bool at_end() const noexcept { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const;
  std::string buf_;
  std::size_t pos_ = 0;
};

inline constexpr std::string_view kModelMagic = "RAGQMODL";
inline constexpr std::uint64_t kModelFormatVersion = 1;

}  // namespace ragq
