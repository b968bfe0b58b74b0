#ifndef SCIDETECT_IO_H_
#define SCIDETECT_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace scidetect {

// Throws IoError if the file is missing or unreadable.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over `path`, so readers never
// observe a partial write.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace scidetect

#endif  // SCIDETECT_IO_H_
