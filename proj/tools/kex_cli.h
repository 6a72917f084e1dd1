/* Copyright 2026 The kex Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// The `kex` command-line driver, callable in-process for tests.

#ifndef KEX_TOOLS_KEX_CLI_H_
#define KEX_TOOLS_KEX_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "kex/error.h"

namespace kex::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitMissingFile = 2;
inline constexpr int kExitUsage = 64;

// An input file that does not exist; reported with exit code 2.
class MissingFileError : public Error {
 public:
  explicit MissingFileError(const std::string& path, std::string_view hint = "")
      : Error("no such file: " + path +
              (hint.empty() ? std::string() : " (" + std::string(hint) + ")")),
        path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// 64-bit FNV-1a of a byte string; used to fingerprint run inputs.
uint64_t Fnv1a64(std::string_view bytes);

// Runs one command line. Normal output goes to `out`, diagnostics to `err`.
int Run(int argc, const char* const argv[], std::ostream& out,
        std::ostream& err);

}  // namespace kex::cli

#endif  // KEX_TOOLS_KEX_CLI_H_
