#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fstream>
#include <iterator>
#include <thread>

#include "skillroute/segmenters.hpp"

namespace skillroute {

namespace fs = std::filesystem;

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

CommandOutcome run_command(const std::string& command, std::chrono::duration<double> timeout,
                           const fs::path& capture_file) {
  const std::string capture = capture_file.string();
  const pid_t pid = fork();
  if (pid < 0) throw Error(ErrorCode::CommandFailed, "fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    const int fd = open(capture.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      dup2(fd, STDOUT_FILENO);
      dup2(fd, STDERR_FILENO);
      close(fd);
    }
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  CommandOutcome outcome;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(timeout);
  int status = 0;
  auto pause = std::chrono::milliseconds(1);
  for (;;) {
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0) throw Error(ErrorCode::CommandFailed, "waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      outcome.timed_out = true;
      break;
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::milliseconds(50));
  }
  if (WIFEXITED(status)) outcome.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status)) outcome.exit_code = 128 + WTERMSIG(status);
  outcome.output = read_text(capture_file);
  return outcome;
}

std::string substitute_placeholders(const std::string& templ, const fs::path& input,
                                    const fs::path& mask, const fs::path& output) {
  const std::pair<std::string_view, std::string> subs[] = {
      {"{input}", shell_quote(input.string())},
      {"{mask}", shell_quote(mask.string())},
      {"{output}", shell_quote(output.string())},
  };
  for (const auto& [key, _] : subs) {
    if (templ.find(key) == std::string::npos) {
      throw Error(ErrorCode::BadConfig,
                  "external command template lacks the " + std::string(key) + " placeholder");
    }
  }
  std::string out;
  for (std::size_t i = 0; i < templ.size();) {
    bool replaced = false;
    for (const auto& [key, value] : subs) {
      if (templ.compare(i, key.size(), key) == 0) {
        out += value;
        i += key.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out += templ[i++];
  }
  return out;
}

LabelVolume segment_external(const ExternalConfig& cfg, const Volume& v, const MaskVolume& m,
                             const fs::path& workdir) {
  require_same_dims(v, m, "segment_external");
  std::error_code ec;
  fs::create_directories(workdir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + workdir.string());

  const char* ext = cfg.io_format == VolumeFormat::Nifti ? ".nii" : ".svol";
  const fs::path input = workdir / (std::string("input") + ext);
  const fs::path mask = workdir / (std::string("mask") + ext);
  const fs::path output = workdir / (std::string("output") + ext);
  fs::remove(output, ec);
  write_volume(v, input);
  write_volume(m, mask);

  const std::string command = substitute_placeholders(cfg.command, input, mask, output);
  const CommandOutcome outcome = run_command(
      command, std::chrono::duration<double>(cfg.timeout_seconds), workdir / "backend.log");
  if (outcome.timed_out) {
    throw Error(ErrorCode::Timeout, "backend exceeded " + std::to_string(cfg.timeout_seconds) +
                                        " s: " + command + "\n" + outcome.output);
  }
  if (outcome.exit_code != 0) {
    throw Error(ErrorCode::CommandFailed, "exit code " + std::to_string(outcome.exit_code) +
                                              ": " + command + "\n" + outcome.output);
  }
  if (!fs::exists(output)) {
    throw Error(ErrorCode::OutputMissing, output.string() + " was not produced\n" + outcome.output);
  }
  LabelVolume labels = load_labels(output);
  require_same_dims(v, labels, "backend output");
  return labels;
}

std::string describe(const SegmenterSpec& spec) {
  switch (spec.kind) {
    case SegmenterSpec::Kind::KMeans: return "kmeans";
    case SegmenterSpec::Kind::VoxelClassifier: return "voxel_classifier";
    case SegmenterSpec::Kind::External: return "external";
  }
  return "unknown";
}

LabelVolume segment(const SegmenterSpec& spec, const Volume& v, const MaskVolume& m,
                    const fs::path& workdir) {
  switch (spec.kind) {
    case SegmenterSpec::Kind::KMeans:
      return segment_kmeans(v, m, spec.kmeans);
    case SegmenterSpec::Kind::VoxelClassifier:
      if (!spec.model) {
        throw Error(ErrorCode::BadConfig, "voxel classifier has no trained parameters");
      }
      return predict_voxel_classifier(*spec.model, v, m).labels;
    case SegmenterSpec::Kind::External:
      return segment_external(spec.external, v, m, workdir);
  }
  throw Error(ErrorCode::BadConfig, "unknown segmenter kind");
}

}  // namespace skillroute
