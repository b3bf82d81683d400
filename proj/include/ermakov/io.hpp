#pragma once

// Locale-free CSV text with 17 significant digits and FNV-1a content hashes.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace ermakov {

inline std::string format_double(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

class CsvWriter
{
public:
    explicit CsvWriter(std::initializer_list<std::string_view> header) : columns_(header.size())
    {
        bool first = true;
        for (auto h : header) {
            if (!first)
                text_ += ',';
            text_ += h;
            first = false;
        }
        text_ += '\n';
    }

    void row(std::span<const double> values)
    {
        if (values.size() != columns_)
            throw ValidationError("CSV row has " + std::to_string(values.size()) + " values, header has " +
                                  std::to_string(columns_));
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i)
                text_ += ',';
            text_ += format_double(values[i]);
        }
        text_ += '\n';
    }

    void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }

    const std::string& str() const noexcept { return text_; }

private:
    std::size_t columns_;
    std::string text_;
};

inline std::uint64_t fnv1a64(std::string_view data) noexcept
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4)
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

struct FileRecord
{
    std::string name;
    std::uint64_t bytes = 0;
    std::string hash;
};

/// Writes `content` to dir/name in binary mode and returns its manifest entry.
inline FileRecord write_artifact(const std::filesystem::path& dir, const std::string& name, std::string_view content)
{
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f)
        throw ValidationError("cannot open output file " + (dir / name).string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f)
        throw ValidationError("failed writing " + (dir / name).string());
    return {name, content.size(), "fnv1a64:" + hex64(fnv1a64(content))};
}

} // namespace ermakov
