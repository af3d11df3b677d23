#include "circfuzz/reference.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "circfuzz/errors.hpp"

namespace circfuzz {

bool BuiltinReference::matches(const std::string& pattern, const Bytes& input) {
  auto it = cache_.find(pattern);
  if (it == cache_.end()) {
    RegexAst ast = parse_regex(pattern, alphabet_);
    it = cache_.emplace(pattern, build_nfa(ast, alphabet_)).first;
  }
  return nfa_match(it->second, input);
}

ExternalReference::ExternalReference(std::string command) : command_(std::move(command)) {
  spawn();
}

ExternalReference::~ExternalReference() { shutdown(); }

void ExternalReference::spawn() {
  int in_pipe[2];   // us -> child stdin
  int out_pipe[2];  // child stdout -> us
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
    throw IoError("cannot create pipes for reference matcher");
  pid_t pid = fork();
  if (pid < 0) throw IoError("cannot fork reference matcher");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  pid_ = pid;
  // A dying child must not take us down with SIGPIPE; writes report EPIPE.
  signal(SIGPIPE, SIG_IGN);
}

void ExternalReference::shutdown() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    kill(static_cast<pid_t>(pid_), SIGTERM);
    int status = 0;
    if (waitpid(static_cast<pid_t>(pid_), &status, WNOHANG) == 0) {
      usleep(50 * 1000);
      if (waitpid(static_cast<pid_t>(pid_), &status, WNOHANG) == 0) {
        kill(static_cast<pid_t>(pid_), SIGKILL);
        waitpid(static_cast<pid_t>(pid_), &status, 0);
      }
    }
    pid_ = -1;
  }
}

std::string ExternalReference::read_line(int timeout_ms) {
  for (;;) {
    std::size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    struct pollfd pfd = {from_child_, POLLIN, 0};
    int r = poll(&pfd, 1, timeout_ms);
    if (r == 0) {
      shutdown();
      throw IoError("reference matcher timed out (" + command_ + ")");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      shutdown();
      throw IoError(std::string("reference matcher poll failed: ") + std::strerror(errno));
    }
    char chunk[4096];
    ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n <= 0) {
      shutdown();
      throw IoError("reference matcher closed its stdout (" + command_ + ")");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

bool ExternalReference::matches(const std::string& pattern, const Bytes& input) {
  if (pid_ < 0) throw IoError("reference matcher is not running (" + command_ + ")");
  std::string query = base64_encode(string_to_bytes(pattern));
  query += '\t';
  query += base64_encode(input);
  query += '\n';
  const char* p = query.data();
  std::size_t left = query.size();
  while (left > 0) {
    ssize_t n = write(to_child_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      shutdown();
      throw IoError(std::string("cannot write to reference matcher: ") + std::strerror(errno));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  std::string reply = read_line(1000);
  if (reply == "1") return true;
  if (reply == "0") return false;
  shutdown();
  throw IoError("reference matcher replied \"" + reply + "\", expected \"0\" or \"1\"");
}

std::unique_ptr<ReferenceMatcher> make_reference(const std::string& spec,
                                                 const Alphabet& alphabet) {
  if (spec.empty() || spec == "builtin") return std::make_unique<BuiltinReference>(alphabet);
  return std::make_unique<ExternalReference>(spec);
}

}  // namespace circfuzz
