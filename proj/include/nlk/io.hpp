#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace nlk {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

/// Comma-separated writer with a header row, '.' decimals and LF line endings.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(std::initializer_list<double> values);
    void row(const std::vector<double>& values);
    /// Mixed textual row (cells already formatted).
    void row_text(const std::vector<std::string>& cells);

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

/// Hex SHA-256 digest of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Record of one CLI run: resolved configuration, timestamps and output inventory.
struct RunManifest {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> config;
    std::string code_version;
    std::string started;
    std::string finished;
    std::string status = "ok";
    std::string error;

    /// Writes manifest.txt into dir, hashing every other regular file found there.
    void write(const std::filesystem::path& dir) const;
};

/// UTC timestamp in ISO 8601 form.
std::string utc_now();

} // namespace nlk
