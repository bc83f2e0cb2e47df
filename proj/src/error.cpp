#include "tdaeeg/error.hpp"

namespace tdaeeg {

namespace {
std::string stage_message(const std::string& stage, const std::string& file,
                          const std::string& message) {
  std::string out = stage;
  if (!file.empty()) out += ": " + file;
  out += ": " + message;
  return out;
}
}  // namespace

StageError::StageError(std::string stage, std::string file, const std::string& message)
    : Error(ErrorCode::stage, stage_message(stage, file, message)),
      stage_(std::move(stage)),
      file_(std::move(file)) {}

}  // namespace tdaeeg
