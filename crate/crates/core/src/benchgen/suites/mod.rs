mod abstract_classes;
mod annotation;
mod deserialization;
mod dynamic_class_loading;
mod exception;
mod externalization;
mod generics;
mod interface;
mod lambda;
mod overloading;
mod overriding;
mod reflection;
mod serialization;

use super::dsl::Case;
use super::Feature;

pub(crate) fn cases(feature: Feature) -> Vec<Case> {
    match feature {
        Feature::Abstract => abstract_classes::cases(),
        Feature::Annotation => annotation::cases(),
        Feature::Deserialization => deserialization::cases(),
        Feature::DynamicClassLoading => dynamic_class_loading::cases(),
        Feature::Exception => exception::cases(),
        Feature::Externalization => externalization::cases(),
        Feature::Generics => generics::cases(),
        Feature::Interface => interface::cases(),
        Feature::Lambda => lambda::cases(),
        Feature::Overloading => overloading::cases(),
        Feature::Overriding => overriding::cases(),
        Feature::Reflection => reflection::cases(),
        Feature::Serialization => serialization::cases(),
    }
}
