#include "nlk/io.hpp"

#include "nlk/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <memory>
#include <sstream>

namespace nlk {

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary), columns_(header.size())
{
    if (!out_)
        throw Error("cannot open " + path.string() + " for writing");
    row_text(header);
}

void CsvWriter::row(std::initializer_list<double> values)
{
    row(std::vector<double>(values));
}

void CsvWriter::row(const std::vector<double>& values)
{
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values)
        cells.push_back(format_double(v));
    row_text(cells);
}

void CsvWriter::row_text(const std::vector<std::string>& cells)
{
    if (cells.size() != columns_)
        throw Error("CSV row width " + std::to_string(cells.size()) + " does not match header width " +
                    std::to_string(columns_));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void RunManifest::write(const std::filesystem::path& dir) const
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().filename() != "manifest.txt")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::ofstream out(dir / "manifest.txt", std::ios::binary);
    out << "[run]\n";
    out << "subcommand=" << subcommand << '\n';
    out << "code_version=" << code_version << '\n';
    out << "started=" << started << '\n';
    out << "finished=" << finished << '\n';
    out << "status=" << status << '\n';
    if (!error.empty())
        out << "error=" << error << '\n';
    out << "\n[config]\n";
    for (const auto& [k, v] : config)
        out << k << '=' << v << '\n';
    out << "\n[outputs]\n";
    for (const auto& f : files)
        out << fs::relative(f, dir).generic_string() << '=' << sha256_file(f) << '\n';
}

} // namespace nlk
