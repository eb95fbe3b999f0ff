// Copyright 2026 The arcnn Authors.
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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace arcnn {

/// (batch, channels, height, width).
struct Shape {
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;

  std::size_t count() const {
    return static_cast<std::size_t>(n) * c * h * w;
  }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  std::size_t sample() const { return static_cast<std::size_t>(c) * h * w; }

  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

/// Dense row-major NCHW array. A default-constructed tensor is empty; every
/// tensor built from a shape has all four extents >= 1.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0));
  Tensor(Shape shape, std::vector<T> data);

  const Shape& shape() const { return shape_; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  T* ptr() { return data_.data(); }
  const T* ptr() const { return data_.data(); }

  T& at(int n, int c, int h, int w) { return data_[index(n, c, h, w)]; }
  const T& at(int n, int c, int h, int w) const {
    return data_[index(n, c, h, w)];
  }

  std::span<T> sample(int n) {
    return std::span<T>(data_).subspan(n * shape_.sample(), shape_.sample());
  }
  std::span<const T> sample(int n) const {
    return std::span<const T>(data_).subspan(n * shape_.sample(),
                                             shape_.sample());
  }
  std::span<T> plane(int n, int c) {
    return std::span<T>(data_).subspan(
        (static_cast<std::size_t>(n) * shape_.c + c) * shape_.plane(),
        shape_.plane());
  }
  std::span<const T> plane(int n, int c) const {
    return std::span<const T>(data_).subspan(
        (static_cast<std::size_t>(n) * shape_.c + c) * shape_.plane(),
        shape_.plane());
  }

  void fill(T v);

  /// Element-type conversion (float <-> double).
  template <typename U>
  Tensor<U> cast() const {
    return Tensor<U>(shape_, std::vector<U>(data_.begin(), data_.end()));
  }

 private:
  std::size_t index(int n, int c, int h, int w) const {
    return ((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h + h) *
               shape_.w +
           w;
  }

  Shape shape_{};
  std::vector<T> data_;
};

/// Sum of elementwise products; accumulated in double.
template <typename T>
double dot(const Tensor<T>& a, const Tensor<T>& b);

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace arcnn
