pub struct MetricsReport;
pub struct TrainConfig;
pub enum TrainError {}
