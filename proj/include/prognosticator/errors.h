// Copyright 2026 The Prognosticator Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROGNOSTICATOR_ERRORS_H_
#define PROGNOSTICATOR_ERRORS_H_

#include <stdexcept>
#include <string>

namespace prognosticator {

// Root of every error this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PROGNOSTICATOR_DEFINE_ERROR(Name)    \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

PROGNOSTICATOR_DEFINE_ERROR(DimensionError);
PROGNOSTICATOR_DEFINE_ERROR(SingularityError);
PROGNOSTICATOR_DEFINE_ERROR(DegenerateWeightsError);
PROGNOSTICATOR_DEFINE_ERROR(DomainError);
PROGNOSTICATOR_DEFINE_ERROR(SequencingError);
PROGNOSTICATOR_DEFINE_ERROR(DataCorruptionError);
PROGNOSTICATOR_DEFINE_ERROR(UnsupportedError);
PROGNOSTICATOR_DEFINE_ERROR(AlignmentError);
PROGNOSTICATOR_DEFINE_ERROR(ConfigError);
PROGNOSTICATOR_DEFINE_ERROR(IoError);
PROGNOSTICATOR_DEFINE_ERROR(DivergenceError);

#undef PROGNOSTICATOR_DEFINE_ERROR

}  // namespace prognosticator

#endif  // PROGNOSTICATOR_ERRORS_H_
