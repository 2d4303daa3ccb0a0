# Copyright 2026 The incodec Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Block-based intra image codec with a learned in-loop filter and neural intra mode."""

from ._incodec import (
    ContractViolation,
    CorruptStream,
    DivergenceError,
    Error,
    IoError,
    MissingModel,
    NumericError,
    WeightFileError,
    bd_psnr,
    bd_rate,
    decode,
    encode,
    forward,
    init_weights,
    load_vectors,
    max_vector_error,
    parameter_count,
    psnr,
    read_pgm,
    read_yuv420,
    save_vectors,
    train_filter_bank,
    write_pgm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
