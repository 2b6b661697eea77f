#pragma once

#include <string>
#include <vector>

namespace disac {

// Shortest-exact decimal formatting (17 significant digits).
std::string format_number(double v);

// CSV cell that is either a formatted number or a literal string.
struct Cell {
  std::string text;
  Cell(double v) : text(format_number(v)) {}
  Cell(int v) : text(std::to_string(v)) {}
  Cell(std::uint64_t v) : text(std::to_string(v)) {}
  Cell(const char* s) : text(s) {}
  Cell(std::string s) : text(std::move(s)) {}
};

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<Cell>>& rows);

void write_text(const std::string& path, const std::string& text);

}  // namespace disac
