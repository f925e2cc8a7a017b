#include "editcraft/ioutil.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace editcraft {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out << content;
    if (!out.good()) throw IoError("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot rename " + tmp + " to " + path);
  }
}

std::vector<std::pair<std::string, std::string>> parse_smiles_lines(
    const std::string& content) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(content);
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::string smiles = line;
    std::string id;
    auto tab = line.find('\t');
    if (tab != std::string::npos) {
      smiles = line.substr(0, tab);
      id = line.substr(tab + 1);
      auto tab2 = id.find('\t');
      if (tab2 != std::string::npos) id = id.substr(0, tab2);
    }
    if (id.empty()) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "m%03zu", index);
      id = buf;
    }
    out.push_back({id, smiles});
    ++index;
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_smiles_file(
    const std::string& path) {
  return parse_smiles_lines(read_file(path));
}

}  // namespace editcraft
