#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fog::nn {

/// Row-major dense array of doubles.
struct Tensor
{
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)), data(count(shape), 0.0) {}
    Tensor(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d))
    {
        if (data.size() != count(shape))
            throw std::invalid_argument("Tensor: data length does not match shape");
    }

    static std::size_t count(const std::vector<int>& s)
    {
        std::size_t n = 1;
        for (int d : s) {
            if (d < 0)
                throw std::invalid_argument("Tensor: negative dimension");
            n *= static_cast<std::size_t>(d);
        }
        return n;
    }

    std::size_t size() const { return data.size(); }
    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(shape[1]) + static_cast<std::size_t>(c)]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(shape[1]) + static_cast<std::size_t>(c)]; }

    friend bool operator==(const Tensor&, const Tensor&) = default;
};

} // namespace fog::nn
