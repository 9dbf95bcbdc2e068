use super::MetricsError;

/// A named set of IoU thresholds whose per-threshold metrics get averaged.
#[derive(Debug, Clone, PartialEq)]
pub struct IouSchedule {
    name: String,
    thresholds: Vec<f64>,
}

impl IouSchedule {
    pub fn new(name: impl Into<String>, thresholds: Vec<f64>) -> Result<Self, MetricsError> {
        if thresholds.is_empty() {
            return Err(MetricsError::Schedule("no thresholds".into()));
        }
        if let Some(t) = thresholds.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return Err(MetricsError::Schedule(format!("threshold {t} outside (0, 1]")));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MetricsError::Schedule("thresholds must be strictly increasing".into()));
        }
        Ok(IouSchedule { name: name.into(), thresholds })
    }

    pub fn iou50() -> Self {
        IouSchedule { name: "IoU=0.5".into(), thresholds: vec![0.5] }
    }

    pub fn iou75() -> Self {
        IouSchedule { name: "IoU=0.75".into(), thresholds: vec![0.75] }
    }

    /// 0.50, 0.55, ..., 0.95.
    pub fn coco() -> Self {
        IouSchedule { name: "IoU=0.5:0.05:0.95".into(), thresholds: (0..10).map(|k| (50 + 5 * k) as f64 / 100.0).collect() }
    }

    pub fn standard() -> Vec<Self> {
        vec![Self::iou50(), Self::iou75(), Self::coco()]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        assert_eq!(IouSchedule::coco().thresholds(), &[0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95]);
        assert_eq!(IouSchedule::standard().len(), 3);
    }

    #[test]
    fn invalid_schedules() {
        assert!(IouSchedule::new("x", vec![]).is_err());
        assert!(IouSchedule::new("x", vec![0.0]).is_err());
        assert!(IouSchedule::new("x", vec![0.6, 0.5]).is_err());
        assert!(IouSchedule::new("x", vec![0.5, 0.5]).is_err());
        assert!(IouSchedule::new("x", vec![0.3, 1.0]).is_ok());
    }
}
