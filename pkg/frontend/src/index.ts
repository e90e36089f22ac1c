export {
  ImageTensor,
  RAW_HEADER_SIZE,
  RAW_MAGIC,
  RAW_VERSION,
  RawFormatError,
  ValidationError,
  decodeRawTensor,
  encodeRawTensor,
  validateImage,
} from "./tensor.js";
export {
  BoundPipeline,
  BoundPipelineOptions,
  ConfigMapping,
  PipelineError,
  SampleManifest,
} from "./pipeline.js";
